from __future__ import annotations

import numpy as np
from scipy import ndimage

from biqme.errors import InputRangeError

from .raster import PlaneF

BOUNDARY_MODE = "reflect"
"""Half-sample symmetric extension (d c b a | a b c d | d c b a)."""


def convolve_2d(plane: PlaneF, kernel: np.ndarray) -> PlaneF:
    """Same-size 2-D convolution with symmetric boundary extension."""
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim == 1:
        kernel = kernel[np.newaxis, :]
    if kernel.ndim != 2 or kernel.shape[0] % 2 == 0 or kernel.shape[1] % 2 == 0:
        raise InputRangeError(f"Kernel dimensions must be odd, got {kernel.shape}")
    return ndimage.convolve(np.asarray(plane, dtype=np.float64), kernel, mode=BOUNDARY_MODE)


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Normalized (sum 1) isotropic Gaussian window of odd `size`."""
    if size % 2 == 0 or size < 1:
        raise InputRangeError(f"Window size must be odd and positive, got {size}")
    half = size // 2
    y, x = np.mgrid[-half : half + 1, -half : half + 1].astype(np.float64)
    kernel = np.exp(-(x**2 + y**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def gaussian_second_derivatives(sigma: float, radius_factor: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical second-derivative-of-Gaussian kernels.

    Each kernel is made zero-sum and scaled so a unit step edge produces a
    peak response of 1.
    """
    radius = max(1, int(np.ceil(radius_factor * sigma)))
    y, x = np.mgrid[-radius : radius + 1, -radius : radius + 1].astype(np.float64)
    g = np.exp(-(x**2 + y**2) / (2.0 * sigma**2))
    g /= g.sum()
    f_h = (x**2 / sigma**4 - 1.0 / sigma**2) * g
    f_h -= f_h.mean()
    width = 4 * radius + 4
    edge = np.zeros((2 * radius + 1, width))
    edge[:, width // 2 :] = 1.0
    peak = np.abs(convolve_2d(edge, f_h)).max()
    f_h /= peak
    return f_h, f_h.T.copy()


__all__ = ["BOUNDARY_MODE", "convolve_2d", "gaussian_kernel", "gaussian_second_derivatives"]
