from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from biqme.constants import GRAY_LEVELS
from biqme.errors import InputRangeError

from .raster import PlaneF

NORMALIZATION_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Histogram256:
    """256-bin gray-level distribution; `normalized` means the bins sum to 1."""

    bins: npt.NDArray[np.float64]
    normalized: bool = False

    def __post_init__(self) -> None:
        bins = np.array(self.bins, dtype=np.float64, copy=True)
        if bins.shape != (GRAY_LEVELS,):
            raise InputRangeError(f"Histogram needs {GRAY_LEVELS} bins, got {bins.shape}")
        if np.any(bins < 0) or not np.all(np.isfinite(bins)):
            raise InputRangeError("Histogram bins must be finite and nonnegative")
        if self.normalized and abs(bins.sum() - 1.0) > NORMALIZATION_TOLERANCE:
            raise InputRangeError(f"Normalized histogram sums to {bins.sum():.12f}")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @classmethod
    def uniform(cls) -> "Histogram256":
        return cls(np.full(GRAY_LEVELS, 1.0 / GRAY_LEVELS), normalized=True)

    @property
    def total(self) -> float:
        return float(self.bins.sum())

    def normalize(self) -> "Histogram256":
        if self.normalized:
            return self
        total = self.total
        if total <= 0:
            raise InputRangeError("Cannot normalize an empty histogram")
        return Histogram256(self.bins / total, normalized=True)

    def cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.normalize().bins)
        return np.minimum(cdf, 1.0)

    def occupied(self) -> np.ndarray:
        return np.flatnonzero(self.bins > 0)


def quantize(plane: np.ndarray) -> np.ndarray:
    """Round real samples to the nearest gray level, clamped to [0, 255]."""
    return np.clip(np.rint(plane), 0, GRAY_LEVELS - 1).astype(np.int64)


def histogram(plane: PlaneF | np.ndarray, normalized: bool = True) -> Histogram256:
    """Bin samples on [0, 255] by round-to-nearest; out-of-range samples are rejected."""
    values = np.asarray(plane, dtype=np.float64)
    if values.size == 0:
        raise InputRangeError("Cannot histogram an empty plane")
    if values.min() < -0.5 or values.max() > GRAY_LEVELS - 0.5 or not np.all(np.isfinite(values)):
        raise InputRangeError(f"Samples outside [0, 255]: min={values.min():.3f} max={values.max():.3f}")
    counts = np.bincount(quantize(values).ravel(), minlength=GRAY_LEVELS).astype(np.float64)
    hist = Histogram256(counts)
    return hist.normalize() if normalized else hist


def entropy(hist: Histogram256) -> float:
    """Shannon entropy in bits, 0 log 0 = 0."""
    if not hist.normalized:
        raise InputRangeError("Entropy needs a normalized histogram")
    p = hist.bins[hist.bins > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


__all__ = ["Histogram256", "histogram", "entropy", "quantize", "NORMALIZATION_TOLERANCE"]
