from __future__ import annotations

import numpy as np
import pytest

from biqme.errors import DimensionMismatchError, ImageSizeError
from biqme.imaging import RasterImage, apply_lut
from biqme.quality import PatchGrid, cpcqi_score, cpcqi_terms, saturation_similarity

from .synthetic import constant, noisy, scene


def test_identical_images_score_one():
    for img in (scene(seed=0, size=48), noisy(seed=1, size=40, color=False), constant(size=24)):
        assert cpcqi_score(img, img) == pytest.approx(1.0, abs=1e-12)


def test_constant_copy_scores_low():
    ref = noisy(seed=2, size=48, color=False)
    flat = RasterImage.from_float(np.full((48, 48), ref.data.mean()))
    assert cpcqi_score(ref, flat) < 0.5


def test_mild_gamma_beats_solarization():
    ref = scene(seed=3, size=64)
    levels = np.arange(256, dtype=np.float64)
    mild = apply_lut(ref, 255.0 * (levels / 255.0) ** 0.9)
    solarized = apply_lut(ref, np.where(levels < 128, levels, 255.0 - levels))
    assert cpcqi_score(ref, mild) > cpcqi_score(ref, solarized)


def test_terms_are_bounded():
    ref = scene(seed=4, size=48)
    dist = noisy(seed=5, size=48)
    for values in cpcqi_terms(ref, dist).values():
        assert np.all(values >= 0.0)
        assert np.all(values <= 1.0 + 1e-12)


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionMismatchError):
        cpcqi_score(constant(size=32), constant(size=40))


def test_image_smaller_than_patch_rejected():
    with pytest.raises(ImageSizeError):
        PatchGrid.from_image(constant(size=8), patch_size=11)


def test_patch_grid_counts_and_unit_structure():
    grid = PatchGrid.from_image(noisy(seed=6, size=31), patch_size=11, stride=4)
    assert grid.count == 6 * 6
    norms = np.linalg.norm(grid.unit_structure(), axis=1)
    assert np.allclose(norms, 1.0)
    flat = PatchGrid.from_image(constant(size=16), patch_size=11, stride=4)
    assert np.all(flat.unit_structure() == 0.0)


def test_saturation_similarity():
    assert saturation_similarity(0.4, 0.4) == pytest.approx(1.0)
    assert saturation_similarity(0.5, 0.0) == pytest.approx(1e-3 / 0.251, rel=1e-9)
    rng = np.random.default_rng(0)
    a, b = rng.uniform(size=20), rng.uniform(size=20)
    assert np.allclose(saturation_similarity(a, b), saturation_similarity(b, a))


def test_gray_images_have_unit_saturation_term():
    ref = noisy(seed=7, size=32, color=False)
    dist = noisy(seed=8, size=32, color=False)
    assert np.all(cpcqi_terms(ref, dist)["cs"] == 1.0)


def test_shifting_periodic_content_by_the_stride_keeps_the_score():
    rng = np.random.default_rng(9)
    tile_ref = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    tile_dist = np.clip(tile_ref.astype(np.int64) // 2 + rng.integers(0, 60, size=(8, 8, 3)), 0, 255).astype(np.uint8)
    ref = np.tile(tile_ref, (8, 8, 1))
    dist = np.tile(tile_dist, (8, 8, 1))
    base = cpcqi_score(RasterImage(ref), RasterImage(dist))
    shifted = cpcqi_score(
        RasterImage(np.roll(ref, (4, 4), axis=(0, 1))),
        RasterImage(np.roll(dist, (4, 4), axis=(0, 1))),
    )
    assert base < 1.0
    assert shifted == pytest.approx(base, rel=1e-12)
