from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from biqme.errors import DatasetError
from biqme.regression import SvrParams, TrainSet, fit_svr
from biqme.settings import EvalSettings, SvrSettings
from biqme.utils import make_rng

from .stats import EvalReport, ScorePairs, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitSummary:
    """Median PLC/SRC/KRC over content-disjoint train/test splits."""

    plc: float
    srocc: float
    krcc: float
    iterations: int
    per_iteration: Tuple[Tuple[float, float, float], ...]


def _groups(data: TrainSet) -> np.ndarray:
    if data.groups is None:
        raise DatasetError("Content-disjoint validation needs a group column")
    return np.asarray(data.groups)


def split_groups(groups: np.ndarray, train_fraction: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Boolean train/test masks; a group never straddles both sides."""
    unique = np.unique(groups)
    if unique.size < 2:
        raise DatasetError("Need at least two distinct groups to split")
    order = rng.permutation(unique)
    n_train = min(max(1, int(round(train_fraction * unique.size))), unique.size - 1)
    train_mask = np.isin(groups, order[:n_train])
    return train_mask, ~train_mask


def split_validation(
    data: TrainSet,
    params: SvrParams,
    iterations: int = 1000,
    train_fraction: float = 0.8,
    seed: int = 0,
    svr: SvrSettings = SvrSettings(),
    settings: EvalSettings = EvalSettings(),
) -> SplitSummary:
    groups = _groups(data)
    rng = make_rng(seed)
    results: List[Tuple[float, float, float]] = []
    for iteration in range(iterations):
        train_mask, test_mask = split_groups(groups, train_fraction, rng)
        subset = data.subset(np.flatnonzero(train_mask))
        model = fit_svr(subset, params, svr.tol, svr.max_iter, cache_rows=svr.cache_rows)
        predictions = model.predict(data.features[test_mask])
        report = evaluate(ScorePairs(predictions, data.labels[test_mask]), settings, seed + iteration)
        results.append((report.plc, report.srocc, report.krcc))
    table = np.array(results)
    medians = np.median(table, axis=0)
    logger.info("Split validation over %d iterations: PLC %.4f SRC %.4f KRC %.4f", iterations, *medians)
    return SplitSummary(float(medians[0]), float(medians[1]), float(medians[2]), iterations, tuple(results))


@dataclass(frozen=True, eq=False)
class LeaveOneGroupOut:
    predictions: np.ndarray
    report: EvalReport


def leave_one_group_out(
    data: TrainSet,
    params: SvrParams,
    svr: SvrSettings = SvrSettings(),
    settings: EvalSettings = EvalSettings(),
    seed: int = 0,
) -> LeaveOneGroupOut:
    """Predict every row from a model trained on all other groups."""
    groups = _groups(data)
    if np.unique(groups).size < 2:
        raise DatasetError("Need at least two distinct groups for leave-one-group-out")
    predictions = np.empty(len(data))
    for group in np.unique(groups):
        held_out = groups == group
        subset = data.subset(np.flatnonzero(~held_out))
        model = fit_svr(subset, params, svr.tol, svr.max_iter, cache_rows=svr.cache_rows)
        predictions[held_out] = model.predict(data.features[held_out])
    report = evaluate(ScorePairs(predictions, data.labels), settings, seed)
    return LeaveOneGroupOut(predictions, report)


def pooled_mean(indices: Sequence[float], weights: Optional[Sequence[float]] = None) -> float:
    """Direct mean, or the weighted mean when dataset sizes are given."""
    values = np.asarray(indices, dtype=np.float64)
    if values.size == 0:
        raise DatasetError("Nothing to pool")
    if weights is None:
        return float(np.mean(values))
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != values.shape or np.any(w < 0) or w.sum() <= 0:
        raise DatasetError("Pooling weights must be nonnegative, match the indices and not all be zero")
    return float(np.sum(values * w) / np.sum(w))


__all__ = ["SplitSummary", "LeaveOneGroupOut", "split_groups", "split_validation", "leave_one_group_out", "pooled_mean"]
