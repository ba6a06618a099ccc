"""
Global tone operators used to synthesize training variants.

Each operator is a 256-entry lookup table applied identically to R, G and B.
Every table except the histogram equalization one is monotone and depends
only on the operator parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)
from typing import Dict, List, Tuple

import numpy as np

from biqme.constants import GRAY_LEVELS
from biqme.errors import InputRangeError
from biqme.imaging import RasterImage, apply_lut, histogram, to_gray
from biqme.settings import GenSettings

_LEVELS = np.arange(GRAY_LEVELS, dtype=np.float64)
_UNIT = _LEVELS / 255.0


class OpKind(StrEnum):
    ORIGINAL = "original"
    GAMMA = "gamma"
    INVERSE_GAMMA = "inverse_gamma"
    S_CURVE = "s_curve"
    INVERSE_S = "inverse_s"
    CONVEX_ARCH = "convex_arch"
    CONCAVE_ARCH = "concave_arch"
    MEAN_SHIFT = "mean_shift"
    HISTOGRAM_EQUALIZATION = "histogram_equalization"


PARAMETRIC_KINDS: Tuple[OpKind, ...] = (
    OpKind.GAMMA,
    OpKind.INVERSE_GAMMA,
    OpKind.S_CURVE,
    OpKind.INVERSE_S,
    OpKind.CONVEX_ARCH,
    OpKind.CONCAVE_ARCH,
    OpKind.MEAN_SHIFT,
)


def gamma_lut(g: float) -> np.ndarray:
    return 255.0 * _UNIT**g


def inverse_gamma_lut(g: float) -> np.ndarray:
    return 255.0 * (1.0 - (1.0 - _UNIT) ** g)


def _logistic(x: np.ndarray, slope: float) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-4.0 * slope * (x - 0.5)))


def s_curve_lut(slope: float) -> np.ndarray:
    """Logistic with gain 4*slope, rescaled to pass through (0, 0) and (255, 255)."""
    lo, hi = _logistic(np.array(0.0), slope), _logistic(np.array(1.0), slope)
    return 255.0 * (_logistic(_UNIT, slope) - lo) / (hi - lo)


def inverse_s_lut(slope: float) -> np.ndarray:
    """Functional inverse of s_curve_lut: flattens mid-tones, steepens the ends."""
    lo, hi = _logistic(np.array(0.0), slope), _logistic(np.array(1.0), slope)
    level = lo + _UNIT * (hi - lo)
    return 255.0 * np.clip(0.5 - np.log(1.0 / level - 1.0) / (4.0 * slope), 0.0, 1.0)


def convex_arch_lut(c: float) -> np.ndarray:
    return 255.0 * (_UNIT - c * _UNIT * (1.0 - _UNIT))


def concave_arch_lut(c: float) -> np.ndarray:
    return 255.0 * (_UNIT + c * _UNIT * (1.0 - _UNIT))


def mean_shift_lut(delta: float) -> np.ndarray:
    return np.clip(_LEVELS + delta, 0.0, 255.0)


def equalization_lut(img: RasterImage) -> np.ndarray:
    """Gray-histogram equalization; identity on a single-level or uniform image."""
    cdf = histogram(to_gray(img)).cdf()
    cdf_min = cdf[np.flatnonzero(cdf > 0)[0]]
    if cdf_min >= 1.0:
        return _LEVELS.copy()
    return np.rint(255.0 * np.clip(cdf - cdf_min, 0.0, None) / (1.0 - cdf_min))


_PARAMETRIC_LUTS = {
    OpKind.GAMMA: ("g", gamma_lut),
    OpKind.INVERSE_GAMMA: ("g", inverse_gamma_lut),
    OpKind.S_CURVE: ("slope", s_curve_lut),
    OpKind.INVERSE_S: ("slope", inverse_s_lut),
    OpKind.CONVEX_ARCH: ("c", convex_arch_lut),
    OpKind.CONCAVE_ARCH: ("c", concave_arch_lut),
    OpKind.MEAN_SHIFT: ("delta", mean_shift_lut),
}


@dataclass(frozen=True)
class EnhanceOp:
    kind: OpKind
    params: Dict[str, float] = field(default_factory=dict)

    def lut(self, img: RasterImage) -> np.ndarray:
        if self.kind is OpKind.ORIGINAL:
            return _LEVELS.copy()
        if self.kind is OpKind.HISTOGRAM_EQUALIZATION:
            return equalization_lut(img)
        name, build = _PARAMETRIC_LUTS[self.kind]
        if name not in self.params:
            raise InputRangeError(f"Operator {self.kind} needs parameter '{name}'")
        return np.clip(build(self.params[name]), 0.0, 255.0)

    def apply(self, img: RasterImage) -> RasterImage:
        return apply_lut(img, self.lut(img))

    @property
    def tag(self) -> str:
        if not self.params:
            return str(self.kind)
        inner = ",".join(f"{k}={v:.6g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}[{inner}]"


def _ranges(cfg: GenSettings) -> Dict[OpKind, Tuple[float, float]]:
    return {
        OpKind.GAMMA: cfg.gamma_range,
        OpKind.INVERSE_GAMMA: cfg.gamma_range,
        OpKind.S_CURVE: cfg.s_slope_range,
        OpKind.INVERSE_S: cfg.s_slope_range,
        OpKind.CONVEX_ARCH: cfg.arch_range,
        OpKind.CONCAVE_ARCH: cfg.arch_range,
        OpKind.MEAN_SHIFT: cfg.shift_range,
    }


def draw_ops(per_op: int, rng: np.random.Generator, cfg: GenSettings = GenSettings()) -> List[EnhanceOp]:
    """per_op parameter draws for each parametric operator, then one equalization."""
    if per_op < 1:
        raise InputRangeError(f"per_op must be at least 1, got {per_op}")
    ranges = _ranges(cfg)
    ops: List[EnhanceOp] = []
    for kind in PARAMETRIC_KINDS:
        name = _PARAMETRIC_LUTS[kind][0]
        lo, hi = ranges[kind]
        for value in rng.uniform(lo, hi, size=per_op):
            ops.append(EnhanceOp(kind, {name: float(value)}))
    ops.append(EnhanceOp(OpKind.HISTOGRAM_EQUALIZATION))
    return ops


__all__ = [
    "OpKind",
    "PARAMETRIC_KINDS",
    "EnhanceOp",
    "gamma_lut",
    "inverse_gamma_lut",
    "s_curve_lut",
    "inverse_s_lut",
    "convex_arch_lut",
    "concave_arch_lut",
    "mean_shift_lut",
    "equalization_lut",
    "draw_ops",
]
