from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from biqme.constants import GRAY_LEVELS
from biqme.errors import InputRangeError
from biqme.imaging import Histogram256, PlaneF, RasterImage, histogram, replace_value

logger = logging.getLogger(__name__)

_LEVELS = np.arange(GRAY_LEVELS, dtype=np.float64)
_CDF_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class GrayLut:
    """256-entry gray-level mapping onto [0, 255]."""

    table: np.ndarray
    degenerate: bool = False

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=np.float64, copy=True)
        if table.shape != (GRAY_LEVELS,) or not np.all(np.isfinite(table)):
            raise InputRangeError(f"LUT needs {GRAY_LEVELS} finite entries")
        table = np.clip(table, 0.0, 255.0)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls, degenerate: bool = False) -> "GrayLut":
        return cls(_LEVELS, degenerate)

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.table) >= 0))

    def apply_value(self, img: RasterImage) -> RasterImage:
        """Remap the HSV value channel, keeping hue and saturation."""
        return replace_value(img, self.table)


def agcwd_lut(h: Histogram256, lambda_b: float) -> GrayLut:
    """Adaptive gamma correction with a weighted distribution.

    A single-level histogram yields the identity LUT flagged degenerate.
    """
    if not 0.0 < lambda_b <= 1.0:
        raise InputRangeError(f"lambda_b must lie in (0, 1], got {lambda_b}")
    pdf = h.normalize().bins
    occupied = h.occupied()
    z_min, z_max = int(occupied[0]), int(occupied[-1])
    if z_min == z_max:
        logger.warning("Single-level histogram at %d; AGCWD returns the identity", z_min)
        return GrayLut.identity(degenerate=True)

    span = pdf[z_min : z_max + 1]
    pdf_min, pdf_max = float(span.min()), float(span.max())
    weighted = np.zeros(GRAY_LEVELS)
    if pdf_max > pdf_min:
        weighted[z_min : z_max + 1] = pdf_max * ((span - pdf_min) / (pdf_max - pdf_min)) ** lambda_b
    else:
        weighted[z_min : z_max + 1] = span
    cdf = np.cumsum(weighted) / weighted.sum()
    cdf = np.minimum(cdf, 1.0)
    cdf[:z_min] = cdf[z_min]
    cdf[z_max + 1 :] = 1.0
    return GrayLut(255.0 * (_LEVELS / 255.0) ** (1.0 - cdf))


def rayleigh_histogram(scale: float = 64.0) -> Histogram256:
    """Discretized Rayleigh density on [0, 255], normalized."""
    density = (_LEVELS / scale**2) * np.exp(-(_LEVELS**2) / (2.0 * scale**2))
    return Histogram256(density / density.sum(), normalized=True)


def rice_target_histogram(h_e: Histogram256, lambda_e: float, lambda_s: float, rayleigh_scale: float = 64.0) -> Histogram256:
    """(h_i + lambda_e h_e + lambda_s h_s) / (1 + lambda_e + lambda_s) with h_i uniform and h_s Rayleigh."""
    if lambda_e < 0 or lambda_s < 0:
        raise InputRangeError("lambda_e and lambda_s must be nonnegative")
    h_i = Histogram256.uniform().bins
    h_s = rayleigh_histogram(rayleigh_scale).bins
    blend = (h_i + lambda_e * h_e.normalize().bins + lambda_s * h_s) / (1.0 + lambda_e + lambda_s)
    return Histogram256(blend / blend.sum(), normalized=True)


def histogram_match(gray: PlaneF | np.ndarray, target: Histogram256) -> GrayLut:
    """m(z) = smallest level whose target CDF reaches the source CDF at z."""
    source_cdf = histogram(gray).cdf()
    target_cdf = target.cdf()
    levels = np.searchsorted(target_cdf, source_cdf - _CDF_SLACK, side="left")
    return GrayLut(np.minimum(levels, GRAY_LEVELS - 1).astype(np.float64))


__all__ = ["GrayLut", "agcwd_lut", "rayleigh_histogram", "rice_target_histogram", "histogram_match"]
