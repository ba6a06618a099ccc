from __future__ import annotations

import numpy as np
import pytest

from biqme.errors import ConvergenceError, DatasetError, MissingFileError, ModelFormatError, UnsupportedVersionError
from biqme.evaluation import ScorePairs, srocc
from biqme.regression import (
    KernelRows,
    SvrModel,
    SvrParams,
    TrainSet,
    cross_validate,
    dumps_model,
    fit_svr,
    fold_assignment,
    grid_search,
    kkt_gap,
    load_model,
    loads_model,
    predict,
    rbf_kernel,
    save_model,
    train,
)
from biqme.settings import DEFAULT_CONFIG, GridSettings, SvrSettings
from biqme.trainset import build_trainset, synthetic_sources
from biqme.workers import BatchRunner


def _dataset(n=60, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, size=(n, 17))
    y = np.sin(3 * x[:, 0]) + 0.5 * x[:, 1] - x[:, 2] ** 2
    return TrainSet(x, y)


def _rows_to_trainset(rows):
    x = np.vstack([row.features.as_array() for row in rows])
    return TrainSet(x, np.array([row.label for row in rows]), tuple(row.group for row in rows))


def _model(seed=0):
    return train(_dataset(seed=seed), SvrParams(t=16.0, p=0.05, k=0.5))


def test_constant_labels_predict_constant():
    x = np.random.default_rng(1).uniform(size=(55, 17))
    model = train(TrainSet(x, np.full(55, 0.7)), SvrParams())
    assert model.dual_coefs.size == 0
    assert model.bias == pytest.approx(0.7)
    queries = np.random.default_rng(2).uniform(-1, 2, size=(10, 17))
    assert np.allclose(model.predict(queries), 0.7)


def test_linear_function_held_out():
    rng = np.random.default_rng(3)
    x = np.full((260, 17), 0.5)
    x[:, 0] = rng.uniform(0, 1, size=260)
    y = 0.5 * x[:, 0] + 0.1
    model = train(TrainSet(x[:200], y[:200]), SvrParams(t=256.0, p=0.01, k=2.0))
    held_out = model.predict(x[200:])
    assert np.max(np.abs(held_out - y[200:])) <= 0.02


def test_model_invariants():
    params = SvrParams(t=16.0, p=0.05, k=0.5)
    data = _dataset()
    model = train(data, params)
    assert np.all(np.abs(model.dual_coefs) <= params.t + 1e-12)
    assert abs(float(np.sum(model.dual_coefs))) <= 1e-6
    assert kkt_gap(model, data, params) <= SvrSettings().tol + 1e-6
    assert model.meta["rows"] == len(data)
    assert model.meta["fingerprint"] == data.fingerprint()


def test_training_predictions_stay_near_the_tube():
    params = SvrParams(t=4096.0, p=0.01, k=4.0)
    data = _dataset(n=50, seed=4)
    model = train(data, params)
    residual = np.abs(model.predict(data.features) - data.labels)
    assert np.max(residual) <= params.p + 2e-3


def test_prediction_matches_kernel_sum():
    model = _model()
    batch = np.random.default_rng(5).uniform(-0.2, 1.2, size=(100, 17))
    scaled = model.normalize(batch)
    expected = np.empty(100)
    for row in range(100):
        total = model.bias
        for coef, vector in zip(model.dual_coefs, model.support_vectors):
            total += coef * np.exp(-model.gamma * np.sum((scaled[row] - vector) ** 2))
        expected[row] = total
    assert np.allclose(model.predict(batch), expected, atol=1e-9)
    assert predict(model, batch[0]) == pytest.approx(expected[0], abs=1e-9)


def test_out_of_range_features_clamp():
    model = _model()
    low = np.full((1, 17), -5.0)
    assert model.predict(low)[0] == model.predict(model.norm_lo[None, :])[0]


def test_constant_feature_scales_to_zero():
    data = _dataset()
    x = np.array(data.features)
    x[:, 5] = 3.0
    model = train(TrainSet(x, data.labels), SvrParams(t=16.0, p=0.05, k=0.5))
    assert model.constant[5]
    assert np.all(model.normalize(x)[:, 5] == 0.0)


def test_zero_support_vectors_give_bias():
    model = SvrModel(np.empty((0, 17)), np.empty(0), 0.25, 1.0, np.zeros(17), np.ones(17))
    assert np.all(model.predict(np.random.default_rng(0).uniform(size=(5, 17))) == 0.25)


def test_invalid_training_data():
    with pytest.raises(DatasetError):
        TrainSet(np.zeros((3, 17)), np.array([1.0, np.nan, 2.0]))
    with pytest.raises(DatasetError):
        TrainSet(np.zeros((3, 17)), np.zeros(4))
    with pytest.raises(DatasetError):
        train(_dataset(n=20), SvrParams())
    with pytest.raises(DatasetError):
        SvrParams(t=0.0)


def test_iteration_cap_raises_with_gap():
    with pytest.raises(ConvergenceError) as info:
        fit_svr(_dataset(), SvrParams(t=16.0, p=0.01, k=0.5), tol=1e-3, max_iter=1)
    assert info.value.details["duality_gap"] > 1e-3


def test_training_is_deterministic():
    first, second = _model(), _model()
    assert np.array_equal(first.dual_coefs, second.dual_coefs)
    assert first.bias == second.bias


def test_save_load_is_exact(tmp_path):
    model = _model()
    path = tmp_path / "model.txt"
    save_model(model, path)
    loaded = load_model(path)
    batch = np.random.default_rng(6).uniform(size=(100, 17))
    assert np.array_equal(loaded.predict(batch), model.predict(batch))
    assert loaded.meta == model.meta
    assert dumps_model(loaded) == dumps_model(model)


def test_truncated_model_file():
    data = dumps_model(_model()).encode("utf-8")
    for cut in (len(data) // 2, len(data) - 5, 10):
        with pytest.raises(ModelFormatError) as info:
            loads_model(data[:cut])
        assert 0 <= info.value.details["offset"] <= cut


def test_unknown_version_rejected():
    data = dumps_model(_model()).replace("BIQME-SVR v1", "BIQME-SVR v2", 1).encode("utf-8")
    with pytest.raises(UnsupportedVersionError):
        loads_model(data)


def test_corrupt_value_reports_offset():
    text = dumps_model(_model())
    broken = text.replace("bias ", "bias x", 1).encode("utf-8")
    with pytest.raises(ModelFormatError) as info:
        loads_model(broken)
    assert info.value.details["offset"] == text.index("bias ")


def test_missing_model_file(tmp_path):
    with pytest.raises(MissingFileError):
        load_model(tmp_path / "none.txt")


def test_fold_assignment_is_seeded():
    folds = fold_assignment(23, 5, seed=3)
    assert np.array_equal(folds, fold_assignment(23, 5, seed=3))
    assert set(folds.tolist()) == {0, 1, 2, 3, 4}


def test_grid_search_picks_minimum():
    grid = GridSettings(t_values=(1.0, 16.0), k_values=(0.25, 1.0), p_values=(0.05,), folds=3)
    result = grid_search(_dataset(), grid, SvrSettings(), seed=0)
    assert len(result.table) == 4
    assert result.rmse == min(rmse for _, rmse in result.table)
    assert (result.best, result.rmse) in result.table


def test_kernel_rows_match_dense_kernel():
    x = np.random.default_rng(7).uniform(size=(30, 17))
    rows = KernelRows(x, 0.5, cache_rows=4)
    dense = rbf_kernel(x, x, 0.5)
    for index in (0, 13, 29, 13):
        assert np.allclose(rows.row(index), dense[index], atol=1e-12)
    assert rows.row.cache_info().hits == 1


def test_duplicated_rows_give_the_same_predictions():
    params = SvrParams(t=4096.0, p=0.1, k=0.5)
    data = _dataset(n=40, seed=8)
    doubled = TrainSet(np.vstack([data.features, data.features]), np.concatenate([data.labels, data.labels]))
    single = fit_svr(data, params, tol=1e-9)
    twice = fit_svr(doubled, params, tol=1e-9)
    batch = np.random.default_rng(9).uniform(size=(50, 17))
    assert np.allclose(single.predict(batch), twice.predict(batch), atol=1e-6)


def test_group_folds_keep_sources_together():
    groups = [f"s{i // 4}" for i in range(40)]
    folds = fold_assignment(40, 5, seed=1, groups=groups)
    for start in range(0, 40, 4):
        assert len(set(folds[start : start + 4].tolist())) == 1
    assert set(folds.tolist()) == {0, 1, 2, 3, 4}
    assert np.array_equal(fold_assignment(7, 5, seed=1, groups=["a", "b"] * 3 + ["a"]), fold_assignment(7, 5, seed=1))


def test_cross_validation_tolerates_the_iteration_cap():
    data = _dataset()
    folds = fold_assignment(len(data), 3, seed=0)
    rmse = cross_validate(data, SvrParams(t=16.0, p=0.01, k=0.5), folds, SvrSettings(), max_iter=1)
    assert np.isfinite(rmse)


def test_grid_search_is_the_same_with_workers():
    grid = GridSettings(t_values=(1.0, 16.0), k_values=(0.25, 1.0), p_values=(0.05,), folds=3)
    serial = grid_search(_dataset(), grid, SvrSettings(), seed=2)
    threaded = grid_search(_dataset(), grid, SvrSettings(), seed=2, runner=BatchRunner(3))
    assert serial.table == threaded.table


@pytest.mark.slow
def test_held_out_sources_rank_like_their_labels():
    sources = synthetic_sources(20, seed=0)
    config = DEFAULT_CONFIG
    runner = BatchRunner(4)
    train_rows, _ = build_trainset(sources[:16], config, seed=0, runner=runner)
    test_rows, _ = build_trainset(sources[16:], config, seed=16, runner=runner)
    assert len(train_rows) + len(test_rows) == 20 * (7 * config.gen.per_op + 2)

    data = _rows_to_trainset(train_rows)
    result = grid_search(data, config.grid, config.svr, seed=0, runner=runner)
    model = train(data, result.best, config.svr)
    held_out = _rows_to_trainset(test_rows)
    assert not set(data.groups) & set(held_out.groups)
    src = srocc(ScorePairs(model.predict(held_out.features), held_out.labels))
    assert src >= 0.85
