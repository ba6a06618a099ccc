from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from biqme.constants import MIN_IMAGE_SIDE
from biqme.errors import ImageSizeError
from biqme.imaging import PlaneF

# CDF 9/7 lifting coefficients (irreversible JPEG 2000 wavelet).
ALPHA = -1.586134342059924
BETA = -0.052980118572961
GAMMA = 0.882911075530934
DELTA = 0.443506852043971
KAPPA = 1.230174104914001

LEVELS = 3


def _neighbours(ns: int, nd: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whole-sample symmetric neighbour indices for the lifting steps."""
    s_right = np.minimum(np.arange(1, nd + 1), ns - 1)
    d_left = np.maximum(np.arange(ns) - 1, 0)
    d_here = np.minimum(np.arange(ns), nd - 1)
    return s_right, d_left, d_here


def _lift_forward(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One 1-D analysis step along axis 0; returns (low, high)."""
    s = x[0::2].copy()
    d = x[1::2].copy()
    s_right, d_left, d_here = _neighbours(len(s), len(d))
    d += ALPHA * (s[: len(d)] + s[s_right])
    s += BETA * (d[d_left] + d[d_here])
    d += GAMMA * (s[: len(d)] + s[s_right])
    s += DELTA * (d[d_left] + d[d_here])
    return s / KAPPA, d * (KAPPA / 2.0)


def _lift_inverse(low: np.ndarray, high: np.ndarray) -> np.ndarray:
    s = low * KAPPA
    d = high * (2.0 / KAPPA)
    s_right, d_left, d_here = _neighbours(len(s), len(d))
    s -= DELTA * (d[d_left] + d[d_here])
    d -= GAMMA * (s[: len(d)] + s[s_right])
    s -= BETA * (d[d_left] + d[d_here])
    d -= ALPHA * (s[: len(d)] + s[s_right])
    out = np.empty((len(s) + len(d),) + s.shape[1:])
    out[0::2] = s
    out[1::2] = d
    return out


def _forward_axis(x: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    low, high = _lift_forward(np.moveaxis(x, axis, 0))
    return np.moveaxis(low, 0, axis), np.moveaxis(high, 0, axis)


def _inverse_axis(low: np.ndarray, high: np.ndarray, axis: int) -> np.ndarray:
    out = _lift_inverse(np.moveaxis(low, axis, 0), np.moveaxis(high, axis, 0))
    return np.moveaxis(out, 0, axis)


@dataclass(frozen=True, eq=False)
class DwtPyramid:
    """Detail subbands per level (index 0 = finest) plus the coarsest LL."""

    details: Tuple[Dict[str, PlaneF], ...]
    approximation: PlaneF

    @property
    def levels(self) -> int:
        return len(self.details)

    def level(self, number: int) -> Dict[str, PlaneF]:
        """Subbands of decomposition level `number` (1-based)."""
        return self.details[number - 1]


def dwt97(gray: PlaneF, levels: int = LEVELS) -> DwtPyramid:
    """Separable CDF 9/7 lifting transform with symmetric extension."""
    current = np.asarray(gray, dtype=np.float64)
    details = []
    for _ in range(levels):
        low, high = _forward_axis(current, axis=1)
        ll, lh = _forward_axis(low, axis=0)
        hl, hh = _forward_axis(high, axis=0)
        details.append({"LH": lh, "HL": hl, "HH": hh})
        current = ll
    return DwtPyramid(details=tuple(details), approximation=current)


def dwt97_3level(gray: PlaneF) -> DwtPyramid:
    """Three-level decomposition; inputs below 32x32 are rejected."""
    height, width = np.shape(gray)
    if height < MIN_IMAGE_SIDE or width < MIN_IMAGE_SIDE:
        raise ImageSizeError(f"Wavelet decomposition needs at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}, got {width}x{height}")
    return dwt97(gray, LEVELS)


def idwt97(pyramid: DwtPyramid) -> PlaneF:
    current = pyramid.approximation
    for bands in reversed(pyramid.details):
        low = _inverse_axis(current, bands["LH"], axis=0)
        high = _inverse_axis(bands["HL"], bands["HH"], axis=0)
        current = _inverse_axis(low, high, axis=1)
    return current


def subband_log_energy(band: PlaneF) -> float:
    """log10(1 + mean squared coefficient)."""
    return float(np.log10(1.0 + np.mean(np.square(band))))


def level_log_energy(bands: Dict[str, PlaneF], hh_weight: float = 4.0) -> float:
    le_lh = subband_log_energy(bands["LH"])
    le_hl = subband_log_energy(bands["HL"])
    le_hh = subband_log_energy(bands["HH"])
    return (0.5 * (le_lh + le_hl) + hh_weight * le_hh) / (1.0 + hh_weight)


def log_energy(pyramid: DwtPyramid, hh_weight: float = 4.0) -> Tuple[float, float]:
    """(LE_2, LE_3); the finest level is decomposed but not used."""
    return level_log_energy(pyramid.level(2), hh_weight), level_log_energy(pyramid.level(3), hh_weight)


__all__ = [
    "DwtPyramid",
    "dwt97",
    "dwt97_3level",
    "idwt97",
    "subband_log_energy",
    "level_log_energy",
    "log_energy",
]
