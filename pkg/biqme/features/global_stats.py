"""
Global statistics of an image: brightness entropies, colorfulness and the
naturalness triple built on MSCN coefficients and a generalized Gaussian fit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy import optimize, special

from biqme.errors import DegenerateInputError, InputRangeError
from biqme.imaging import (
    PlaneF,
    RasterImage,
    convolve_2d,
    entropy,
    gaussian_kernel,
    histogram,
    opponent_channels,
    saturation_plane,
)
from biqme.settings import BrightnessSettings, GgdSettings, MscnSettings

logger = logging.getLogger(__name__)

BrightnessConfig = BrightnessSettings
MscnConfig = MscnSettings

NU_STEP = 1e-3
NU_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GgdFit:
    nu: float
    sigma2: float
    clamped: bool = False
    degenerate: bool = False


def brightness_entropies(gray: PlaneF, cfg: BrightnessConfig = BrightnessConfig()) -> Tuple[float, ...]:
    """Entropy of clamp(m * gray) for each multiplier, in configured order."""
    plane = np.asarray(gray, dtype=np.float64)
    return tuple(
        entropy(histogram(np.clip(m * plane, cfg.t_lower, cfg.t_upper)))
        for m in cfg.multipliers
    )


def colorfulness_pair(img: RasterImage, kappa: float = 0.3) -> Tuple[float, float]:
    """(S, C): mean saturation and opponent-channel colorfulness."""
    img.require_color()
    saturation = float(np.mean(saturation_plane(img)))
    yb, rg = opponent_channels(img)
    spread = np.hypot(np.std(yb), np.std(rg))
    offset = np.hypot(np.mean(yb), np.mean(rg))
    return saturation, float(spread + kappa * offset)


def mscn(gray: PlaneF, cfg: MscnConfig = MscnConfig()) -> PlaneF:
    """Mean-subtracted contrast-normalized coefficients."""
    plane = np.asarray(gray, dtype=np.float64)
    window = gaussian_kernel(cfg.window, cfg.sigma)
    mu = convolve_2d(plane, window)
    sigma = np.sqrt(np.abs(convolve_2d(plane * plane, window) - mu * mu))
    return (plane - mu) / (sigma + cfg.epsilon)


def ggd_ratio(nu: float | np.ndarray) -> float | np.ndarray:
    """Gamma(1/nu) Gamma(3/nu) / Gamma(2/nu)^2, decreasing in nu."""
    nu = np.asarray(nu, dtype=np.float64)
    ratio = np.exp(special.gammaln(1.0 / nu) + special.gammaln(3.0 / nu) - 2.0 * special.gammaln(2.0 / nu))
    return float(ratio) if ratio.ndim == 0 else ratio


@lru_cache(maxsize=4)
def _ratio_table(nu_min: float, nu_max: float) -> Tuple[np.ndarray, np.ndarray]:
    grid = np.arange(nu_min, nu_max + NU_STEP / 2, NU_STEP)
    grid[-1] = nu_max
    return grid, ggd_ratio(grid)


def invert_ggd_ratio(rho: float, nu_min: float = 0.2, nu_max: float = 10.0) -> Tuple[float, bool]:
    """Shape nu with ggd_ratio(nu) == rho; returns (nu, clamped)."""
    grid, ratios = _ratio_table(nu_min, nu_max)
    if rho >= ratios[0]:
        return nu_min, True
    if rho <= ratios[-1]:
        return nu_max, True
    # ratios decrease along the grid
    upper = int(np.searchsorted(-ratios, -rho, side="left"))
    lower = upper - 1
    if ratios[upper] == rho:
        return float(grid[upper]), False
    nu = optimize.bisect(lambda v: ggd_ratio(v) - rho, grid[lower], grid[upper], xtol=NU_TOLERANCE)
    return float(nu), False


def ggd_fit(samples: Sequence[float] | np.ndarray, cfg: GgdSettings = GgdSettings()) -> GgdFit:
    """Zero-mean generalized Gaussian fit by moment matching."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < cfg.min_samples:
        raise InputRangeError(f"GGD fit needs at least {cfg.min_samples} samples, got {x.size}")
    if np.all(x == x[0]):
        raise DegenerateInputError("GGD fit on all-equal samples")
    sigma2 = float(np.mean(x * x))
    rho = sigma2 / float(np.mean(np.abs(x))) ** 2
    nu, clamped = invert_ggd_ratio(rho, cfg.nu_min, cfg.nu_max)
    if clamped:
        logger.warning("GGD shape clamped to %.3f (moment ratio %.6f)", nu, rho)
    return GgdFit(nu=nu, sigma2=sigma2, clamped=clamped)


def dark_channel_mean(img: RasterImage) -> float:
    """Mean of the pixel-wise min(R, G, B) / 255."""
    img.require_color()
    return float(np.mean(img.data.min(axis=2)) / 255.0)


__all__ = [
    "BrightnessConfig",
    "MscnConfig",
    "GgdFit",
    "brightness_entropies",
    "colorfulness_pair",
    "mscn",
    "ggd_ratio",
    "invert_ggd_ratio",
    "ggd_fit",
    "dark_channel_mean",
]
