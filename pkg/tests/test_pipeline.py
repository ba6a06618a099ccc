from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy import ndimage

from biqme.constants import FEATURE_COLUMNS
from biqme.errors import DatasetError, ImageSizeError, MissingFileError
from biqme.features import (
    FAMILY_COLUMNS,
    FeatureExtractor,
    FeatureFamily,
    FeatureRow,
    FeatureVector,
    extract_features,
    read_feature_csv,
    write_feature_csv,
)
from biqme.imaging import RasterImage
from biqme.regression import BiqmeScorer, SvrParams, TrainSet, train

from .synthetic import checkerboard, constant, scene


def _extractor():
    return FeatureExtractor()


def test_constant_gray_image_vector():
    vector = _extractor().extract(constant(100, size=48, color=False))
    values = vector.as_array()
    assert np.allclose(values[:14], 0.0, atol=1e-9)
    assert vector.nu == 2.0
    assert vector.sigma2 == 0.0
    assert vector.ggd_degenerate
    assert vector.dark_channel == pytest.approx(100 / 255)


def test_color_image_vector_is_finite_and_in_range():
    vector = _extractor().extract(scene(seed=1, size=64))
    assert vector.is_finite()
    assert 0.0 <= vector.e_pc <= 8.0
    assert all(0.0 <= getattr(vector, f"e_m{i}") <= 8.0 for i in range(1, 7))
    assert 0.0 <= vector.saturation <= 1.0
    assert 0.0 <= vector.dark_channel <= 1.0
    assert vector.colorfulness >= 0.0
    assert 0.2 <= vector.nu <= 10.0


def test_checkerboard_gray_features():
    vector = extract_features(checkerboard(size=64, cell=8, low=40, high=210))
    assert vector.e_pc == pytest.approx(1.0, abs=0.05)
    assert (vector.ce_yb, vector.ce_rg) == (0.0, 0.0)
    assert (vector.saturation, vector.colorfulness) == (0.0, 0.0)
    assert vector.dark_channel == pytest.approx(125 / 255)


def test_extraction_is_deterministic():
    img = scene(seed=2, size=48)
    extractor = _extractor()
    assert np.array_equal(extractor.extract(img).as_array(), extractor.extract(img).as_array())


def test_skipping_families_leaves_others_unchanged():
    img = scene(seed=3, size=48)
    extractor = _extractor()
    full = extractor.extract(img).as_dict()
    partial = extractor.extract(img, [FeatureFamily.SHARPNESS, FeatureFamily.COLORFULNESS]).as_dict()
    kept = set(FAMILY_COLUMNS[FeatureFamily.SHARPNESS]) | set(FAMILY_COLUMNS[FeatureFamily.COLORFULNESS])
    for column in FEATURE_COLUMNS:
        if column in kept:
            assert partial[column] == full[column]
        else:
            assert math.isnan(partial[column])


def test_undersized_image_rejected():
    with pytest.raises(ImageSizeError):
        _extractor().extract(constant(size=20))


def test_feature_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    rows = [
        FeatureRow(f"img{i}.png", FeatureVector.from_array(rng.normal(size=17)), label=float(rng.uniform()), group=f"g{i % 2}")
        for i in range(4)
    ]
    path = tmp_path / "features.csv"
    write_feature_csv(path, rows)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "path," + ",".join(FEATURE_COLUMNS) + ",label,group"

    loaded = read_feature_csv(path, require_label=True)
    assert [row.path for row in loaded] == [row.path for row in rows]
    for original, restored in zip(rows, loaded):
        assert np.allclose(restored.features.as_array(), original.features.as_array(), rtol=1e-8)
        assert restored.label == pytest.approx(original.label, rel=1e-8)
        assert restored.group == original.group


def test_feature_csv_column_subset_reads_back_as_nan(tmp_path):
    row = FeatureRow("a.png", FeatureVector.from_array(np.arange(17.0)))
    path = tmp_path / "subset.csv"
    write_feature_csv(path, [row], columns=["f01", "f05"])
    (loaded,) = read_feature_csv(path)
    values = loaded.features.as_dict()
    assert values["f01"] == 0.0
    assert values["f05"] == 4.0
    assert math.isnan(values["f02"])


def test_feature_csv_errors(tmp_path):
    with pytest.raises(MissingFileError):
        read_feature_csv(tmp_path / "missing.csv")
    path = tmp_path / "nolabel.csv"
    write_feature_csv(path, [FeatureRow("a.png", FeatureVector.from_array(np.zeros(17)))])
    with pytest.raises(DatasetError):
        read_feature_csv(path, require_label=True)
    with pytest.raises(DatasetError):
        write_feature_csv(tmp_path / "bad.csv", [], columns=["f99"])


@pytest.mark.slow
def test_full_resolution_scoring_time():
    rng = np.random.default_rng(21)
    scene_data = ndimage.gaussian_filter(rng.uniform(0, 255, size=(576, 768, 3)), sigma=(2.0, 2.0, 0.0))
    img = RasterImage.from_float(scene_data)
    x = rng.uniform(0, 1, size=(80, len(FEATURE_COLUMNS)))
    scorer = BiqmeScorer(train(TrainSet(x, x[:, 0]), SvrParams()))

    started = time.perf_counter()
    score = scorer(img)
    elapsed = time.perf_counter() - started
    assert math.isfinite(score)
    assert elapsed < 5.0
