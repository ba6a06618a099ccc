from __future__ import annotations

from typing import Tuple

import numpy as np

from biqme.errors import ChannelError

from .raster import PlaneF, RasterImage

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def _rgb(img: RasterImage) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not img.is_color:
        raise ChannelError("Operation needs a 3-channel RGB image")
    data = img.as_float()
    return data[:, :, 0], data[:, :, 1], data[:, :, 2]


def to_gray(img: RasterImage) -> PlaneF:
    """Luminance 0.299R + 0.587G + 0.114B on [0, 255]; gray input is copied."""
    if not img.is_color:
        return img.as_float()
    r, g, b = _rgb(img)
    gray = GRAY_WEIGHTS[0] * r + GRAY_WEIGHTS[1] * g + GRAY_WEIGHTS[2] * b
    return np.clip(gray, 0.0, 255.0)


def opponent_channels(img: RasterImage) -> Tuple[PlaneF, PlaneF]:
    """Yellow-blue 0.5(R+G)-B and red-green R-G planes, both on [-255, 255]."""
    r, g, b = _rgb(img)
    return 0.5 * (r + g) - b, r - g


def saturation_plane(img: RasterImage) -> PlaneF:
    """HSV saturation (max-min)/max per pixel, 0 where max is 0."""
    data = img.as_float()
    if data.ndim == 2:
        raise ChannelError("Saturation needs a 3-channel RGB image")
    high = data.max(axis=2)
    low = data.min(axis=2)
    return np.divide(high - low, high, out=np.zeros_like(high), where=high > 0)


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV for float arrays on [0, 1]; hue on [0, 1)."""
    rgb = np.asarray(rgb, dtype=np.float64)
    high = rgb.max(axis=-1)
    low = rgb.min(axis=-1)
    delta = high - low
    sat = np.divide(delta, high, out=np.zeros_like(high), where=high > 0)

    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    safe = np.where(delta > 0, delta, 1.0)
    hue = np.where(
        high == r,
        ((g - b) / safe) % 6.0,
        np.where(high == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    hue = np.where(delta > 0, hue / 6.0, 0.0)
    return np.stack([hue, sat, high], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_hsv."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    sector = np.floor(h * 6.0)
    frac = h * 6.0 - sector
    p = v * (1.0 - s)
    q = v * (1.0 - s * frac)
    t = v * (1.0 - s * (1.0 - frac))
    idx = sector.astype(np.int64) % 6
    choices_r = [v, q, p, p, t, v]
    choices_g = [t, v, v, q, p, p]
    choices_b = [p, p, t, v, v, q]
    r = np.choose(idx, choices_r)
    g = np.choose(idx, choices_g)
    b = np.choose(idx, choices_b)
    return np.stack([r, g, b], axis=-1)


def value_channel(img: RasterImage) -> np.ndarray:
    """HSV value (max over RGB) as 8-bit samples; gray images pass through."""
    if not img.is_color:
        return img.data.copy()
    return img.data.max(axis=2)


def replace_value(img: RasterImage, lut: np.ndarray) -> RasterImage:
    """Remap the HSV value channel through `lut` keeping hue and saturation."""
    table = np.asarray(lut, dtype=np.float64)
    if not img.is_color:
        return RasterImage.from_float(table[img.data])
    hsv = rgb_to_hsv(img.as_float() / 255.0)
    hsv[..., 2] = np.clip(table[img.data.max(axis=2)], 0.0, 255.0) / 255.0
    return RasterImage.from_float(hsv_to_rgb(hsv) * 255.0)


__all__ = [
    "GRAY_WEIGHTS",
    "to_gray",
    "opponent_channels",
    "saturation_plane",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "value_channel",
    "replace_value",
]
