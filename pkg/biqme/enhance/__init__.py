"""Histogram-based enhancement driven by the blind quality score."""

from .boiem import BoiemConfig, EnhanceResult, Evaluation, agcwd_enhance, enhance, rice_enhance
from .tone import GrayLut, agcwd_lut, histogram_match, rayleigh_histogram, rice_target_histogram

__all__ = [
    "BoiemConfig",
    "Evaluation",
    "EnhanceResult",
    "agcwd_enhance",
    "rice_enhance",
    "enhance",
    "GrayLut",
    "agcwd_lut",
    "rayleigh_histogram",
    "rice_target_histogram",
    "histogram_match",
]
