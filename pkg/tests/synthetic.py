"""Small deterministic images shared by the tests."""

from __future__ import annotations

import numpy as np

from biqme.imaging import RasterImage


def constant(value: int = 128, size: int = 64, color: bool = True) -> RasterImage:
    shape = (size, size, 3) if color else (size, size)
    return RasterImage(np.full(shape, value, dtype=np.uint8))


def checkerboard(size: int = 64, cell: int = 8, low: int = 0, high: int = 255) -> RasterImage:
    y, x = np.indices((size, size))
    plane = np.where(((y // cell) + (x // cell)) % 2 == 0, low, high).astype(np.uint8)
    return RasterImage(plane)


def step_edge(size: int = 64, low: int = 50, high: int = 200) -> RasterImage:
    plane = np.full((size, size), low, dtype=np.uint8)
    plane[:, size // 2 :] = high
    return RasterImage(plane)


def gradient(size: int = 64, color: bool = True) -> RasterImage:
    ramp = np.tile(np.linspace(0, 255, size), (size, 1))
    if not color:
        return RasterImage.from_float(ramp)
    rgb = np.stack([ramp, ramp.T, 255 - ramp], axis=-1)
    return RasterImage.from_float(rgb)


def noisy(seed: int = 0, size: int = 64, color: bool = True, mean: float = 128.0, std: float = 40.0) -> RasterImage:
    rng = np.random.default_rng(seed)
    shape = (size, size, 3) if color else (size, size)
    return RasterImage.from_float(rng.normal(mean, std, size=shape))


def scene(seed: int = 0, size: int = 64) -> RasterImage:
    """Smooth color gradient with mild texture."""
    rng = np.random.default_rng(seed)
    base = gradient(size).as_float() * 0.7 + 30
    return RasterImage.from_float(base + rng.normal(0, 6, size=base.shape))


__all__ = ["constant", "checkerboard", "step_edge", "gradient", "noisy", "scene"]
