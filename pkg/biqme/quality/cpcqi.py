from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from biqme.errors import DimensionMismatchError, ImageSizeError
from biqme.imaging import RasterImage, saturation_plane, to_gray
from biqme.settings import CpcqiSettings

logger = logging.getLogger(__name__)

DYNAMIC_RANGE = 255.0
# Patches weaker than this carry no structure.
_FLAT_STRENGTH = 1e-8


def _patches(plane: np.ndarray, size: int, stride: int) -> np.ndarray:
    windows = sliding_window_view(plane, (size, size))[::stride, ::stride]
    return windows.reshape(-1, size * size)


@dataclass(frozen=True, eq=False)
class PatchGrid:
    """Per-patch mean, strength, mean-removed structure and saturation on a strided grid."""

    patch_size: int
    stride: int
    mean: np.ndarray
    strength: np.ndarray
    residual: np.ndarray
    saturation: np.ndarray

    @classmethod
    def from_image(cls, img: RasterImage, patch_size: int = 11, stride: int = 4) -> "PatchGrid":
        if img.height < patch_size or img.width < patch_size:
            raise ImageSizeError(f"Image {img.width}x{img.height} is smaller than a {patch_size}x{patch_size} patch")
        gray = _patches(to_gray(img), patch_size, stride)
        mean = gray.mean(axis=1)
        residual = gray - mean[:, None]
        strength = np.sqrt(np.mean(residual * residual, axis=1))
        residual[strength <= _FLAT_STRENGTH] = 0.0
        if img.is_color:
            saturation = _patches(saturation_plane(img), patch_size, stride).mean(axis=1)
        else:
            saturation = np.zeros_like(mean)
        return cls(patch_size, stride, mean, strength, residual, saturation)

    @property
    def count(self) -> int:
        return int(self.mean.shape[0])

    def unit_structure(self) -> np.ndarray:
        """Unit-norm structure vectors; zero rows for flat patches."""
        norms = np.linalg.norm(self.residual, axis=1, keepdims=True)
        return np.divide(self.residual, norms, out=np.zeros_like(self.residual), where=norms > 0)


def _ratio_similarity(a: np.ndarray, b: np.ndarray, c: float) -> np.ndarray:
    return (2.0 * a * b + c) / (a * a + b * b + c)


def _structure_dot(grid1: PatchGrid, grid2: PatchGrid) -> np.ndarray:
    """u1 . u2, with 1 for two flat patches and 0 when only one is flat."""
    cross = np.sum(grid1.residual * grid2.residual, axis=1)
    energy = np.sqrt(np.sum(grid1.residual**2, axis=1) * np.sum(grid2.residual**2, axis=1))
    flat1 = ~np.any(grid1.residual, axis=1)
    flat2 = ~np.any(grid2.residual, axis=1)
    dot = np.divide(cross, energy, out=np.zeros_like(cross), where=energy > 0)
    dot[flat1 & flat2] = 1.0
    return dot


def saturation_similarity(st1: float | np.ndarray, st2: float | np.ndarray, zeta: float = 1e-3, phi: float = 1.0):
    """((2 st1 st2 + zeta) / (st1^2 + st2^2 + zeta)) ** phi"""
    return _ratio_similarity(np.asarray(st1, dtype=np.float64), np.asarray(st2, dtype=np.float64), zeta) ** phi


def cpcqi_terms(reference: RasterImage, distorted: RasterImage, cfg: CpcqiSettings = CpcqiSettings()) -> dict:
    """Per-patch similarity terms (mi, cc, sd, cs), each of length M."""
    if not reference.same_geometry(distorted):
        raise DimensionMismatchError(
            f"Reference {reference.width}x{reference.height} vs distorted {distorted.width}x{distorted.height}"
        )
    grid1 = PatchGrid.from_image(reference, cfg.patch_size, cfg.stride)
    grid2 = PatchGrid.from_image(distorted, cfg.patch_size, cfg.stride)
    c1 = (cfg.k1 * DYNAMIC_RANGE) ** 2
    c2 = (cfg.k2 * DYNAMIC_RANGE) ** 2
    c3 = c2 / 2.0
    q_sd = np.clip((_structure_dot(grid1, grid2) + c3) / (1.0 + c3), 0.0, 1.0)
    return {
        "mi": _ratio_similarity(grid1.mean, grid2.mean, c1),
        "cc": _ratio_similarity(grid1.strength, grid2.strength, c2),
        "sd": q_sd,
        "cs": saturation_similarity(grid1.saturation, grid2.saturation, cfg.zeta, cfg.phi),
    }


def cpcqi_score(reference: RasterImage, distorted: RasterImage, cfg: CpcqiSettings = CpcqiSettings()) -> float:
    """Mean over patches of Q_mi * Q_cc * Q_sd * Q_cs."""
    terms = cpcqi_terms(reference, distorted, cfg)
    score = float(np.mean(terms["mi"] * terms["cc"] * terms["sd"] * terms["cs"]))
    logger.debug("C-PCQI over %d patches: %.6f", terms["mi"].shape[0], score)
    return score


__all__ = ["PatchGrid", "saturation_similarity", "cpcqi_terms", "cpcqi_score"]
