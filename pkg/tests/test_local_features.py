from __future__ import annotations

import numpy as np
import pytest
from scipy import ndimage

from biqme.errors import ImageSizeError
from biqme.features import (
    CeParams,
    contrast_energy,
    dwt97,
    dwt97_3level,
    idwt97,
    level_log_energy,
    log_energy,
    subband_log_energy,
)
from biqme.imaging import RasterImage, to_gray

from .synthetic import checkerboard, constant, noisy, scene


def test_constant_image_has_zero_contrast_energy():
    assert contrast_energy(constant(140, size=40)) == (0.0, 0.0, 0.0)


def test_gray_image_has_zero_opponent_energy():
    ce_gr, ce_yb, ce_rg = contrast_energy(checkerboard(size=40))
    assert ce_gr > 0.0
    assert (ce_yb, ce_rg) == (0.0, 0.0)


def test_contrast_energy_drops_with_contrast():
    board = checkerboard(size=48, cell=6)
    data = board.as_float()
    blended = RasterImage.from_float(0.5 * data + 0.5 * data.mean())
    assert contrast_energy(board)[0] > contrast_energy(blended)[0]


def test_contrast_energy_bounded():
    params = CeParams()
    for seed in range(3):
        values = contrast_energy(noisy(seed=seed, size=40), params)
        assert all(np.isfinite(values))
        assert all(v >= 0.0 for v in values)


def test_swapping_red_and_green_keeps_opponent_energy():
    img = scene(seed=5, size=48)
    swapped = RasterImage(img.data[:, :, [1, 0, 2]])
    _, yb, rg = contrast_energy(img)
    _, yb_s, rg_s = contrast_energy(swapped)
    assert yb_s == pytest.approx(yb, rel=1e-12)
    assert rg_s == pytest.approx(rg, rel=1e-12)


def test_dwt_perfect_reconstruction():
    rng = np.random.default_rng(0)
    for shape in ((64, 64), (48, 80), (45, 37)):
        plane = rng.uniform(0, 255, size=shape)
        restored = idwt97(dwt97(plane, 3))
        assert restored.shape == plane.shape
        assert np.sqrt(np.mean((restored - plane) ** 2)) < 1e-6


def test_dwt_subbands_halve_per_level():
    pyramid = dwt97_3level(np.zeros((64, 45)))
    assert pyramid.levels == 3
    assert pyramid.level(1)["HH"].shape == (32, 22)
    assert pyramid.level(2)["LH"].shape == (16, 12)
    assert pyramid.level(3)["HL"].shape == (8, 6)
    assert pyramid.approximation.shape == (8, 6)


def test_constant_plane_has_no_detail():
    pyramid = dwt97_3level(np.full((40, 40), 123.0))
    for level in range(1, 4):
        for band in pyramid.level(level).values():
            assert np.allclose(band, 0.0, atol=1e-9)
    assert log_energy(pyramid) == pytest.approx((0.0, 0.0), abs=1e-12)


def test_undersized_plane_rejected():
    with pytest.raises(ImageSizeError):
        dwt97_3level(np.zeros((31, 64)))


def test_level_log_energy_weights_sum_to_one():
    rng = np.random.default_rng(1)
    band = rng.normal(size=(8, 8))
    value = subband_log_energy(band)
    assert level_log_energy({"LH": band, "HL": band, "HH": band}) == pytest.approx(value)


def test_log_energy_matches_direct_summation():
    plane = np.random.default_rng(2).uniform(0, 255, size=(64, 64))
    pyramid = dwt97_3level(plane)

    def _le(band):
        return np.log10(1.0 + np.sum(band**2) / band.size)

    expected = []
    for level in (2, 3):
        bands = pyramid.level(level)
        expected.append((0.5 * (_le(bands["LH"]) + _le(bands["HL"])) + 4.0 * _le(bands["HH"])) / 5.0)
    assert log_energy(pyramid, 4.0) == pytest.approx(tuple(expected), abs=1e-9)


def test_blur_does_not_increase_log_energy():
    gray = to_gray(noisy(seed=3, size=128, color=False))
    previous = None
    for sigma in (0, 1, 2, 4):
        plane = ndimage.gaussian_filter(gray, sigma) if sigma else gray
        current = log_energy(dwt97_3level(plane))
        if previous is not None:
            assert current[0] <= previous[0]
            assert current[1] <= previous[1]
        previous = current
