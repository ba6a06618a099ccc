"""
Epsilon-SVR with an RBF kernel.

The dual is solved by sequential minimal optimization over the 2l-variable
formulation (one variable per tube side). The first variable is the maximal
violator; the second maximizes the second-order gain. Iteration stops when
the KKT gap drops below `tol`.
Features are min-max scaled to [0, 1] with the training ranges stored in
the model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from biqme.constants import FEATURE_COUNT
from biqme.errors import ConvergenceError, DatasetError
from biqme.settings import GridSettings, SvrSettings
from biqme.utils import make_rng, sha256_hex
from biqme.workers import BatchRunner

logger = logging.getLogger(__name__)

_TAU = 1e-12


@dataclass(frozen=True)
class SvrParams:
    """Box bound t, tube half-width p and RBF width k."""

    t: float = 256.0
    p: float = 0.01
    k: float = 1.0 / FEATURE_COUNT

    def __post_init__(self) -> None:
        if min(self.t, self.p, self.k) <= 0:
            raise DatasetError(f"SVR hyperparameters must be positive: {self}")

    @classmethod
    def from_settings(cls, settings: SvrSettings) -> "SvrParams":
        return cls(t=settings.t, p=settings.p, k=settings.k)


@dataclass(frozen=True, eq=False)
class TrainSet:
    """Feature matrix (n, 17) with finite labels; groups name the source content."""

    features: np.ndarray
    labels: np.ndarray
    groups: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        x = np.array(self.features, dtype=np.float64, copy=True)
        y = np.array(self.labels, dtype=np.float64, copy=True).ravel()
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DatasetError(f"Feature matrix {x.shape} does not match {y.shape[0]} labels")
        if not np.all(np.isfinite(y)):
            raise DatasetError("Training labels must be finite")
        if not np.all(np.isfinite(x)):
            raise DatasetError("Training features must be finite")
        if self.groups is not None and len(self.groups) != y.shape[0]:
            raise DatasetError("Group column length does not match the rows")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def subset(self, index: np.ndarray) -> "TrainSet":
        groups = None if self.groups is None else tuple(self.groups[i] for i in index)
        return TrainSet(self.features[index], self.labels[index], groups)

    def fingerprint(self) -> str:
        return sha256_hex(self.features.tobytes() + self.labels.tobytes())


@dataclass(frozen=True, eq=False)
class SvrModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    gamma: float
    norm_lo: np.ndarray
    norm_hi: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return int(self.norm_lo.shape[0])

    @property
    def constant(self) -> np.ndarray:
        """Features with no training spread; they always scale to 0."""
        return self.norm_hi <= self.norm_lo

    def normalize(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.n_features:
            raise DatasetError(f"Model expects {self.n_features} features, got {x.shape[1]}")
        span = np.where(self.constant, 1.0, self.norm_hi - self.norm_lo)
        scaled = np.where(self.constant, 0.0, (x - self.norm_lo) / span)
        return np.clip(scaled, 0.0, 1.0)

    def decision(self, scaled: np.ndarray) -> np.ndarray:
        if self.dual_coefs.size == 0:
            return np.full(scaled.shape[0], self.bias)
        return rbf_kernel(scaled, self.support_vectors, self.gamma) @ self.dual_coefs + self.bias

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Scores for a (n, 17) batch or a single vector."""
        return self.decision(self.normalize(x))


def predict(model: SvrModel, x: np.ndarray) -> float | np.ndarray:
    values = model.predict(x)
    return float(values[0]) if np.ndim(x) == 1 else values


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(a, b, "sqeuclidean"))


def feature_ranges(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return x.min(axis=0), x.max(axis=0)


class KernelRows:
    """RBF kernel rows over one scaled matrix, computed on demand and LRU-cached."""

    def __init__(self, x: np.ndarray, gamma: float, cache_rows: int = 4096) -> None:
        self._x = x
        self._gamma = gamma
        self._sq = np.einsum("ij,ij->i", x, x)
        self.row = lru_cache(maxsize=cache_rows)(self._compute)

    def _compute(self, index: int) -> np.ndarray:
        dist = self._sq + self._sq[index] - 2.0 * (self._x @ self._x[index])
        row = np.exp(-self._gamma * np.maximum(dist, 0.0))
        row.setflags(write=False)
        return row


def _up_low(alpha: np.ndarray, sign: np.ndarray, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """Masks of the variables allowed to move up / down along their sign."""
    top = sign > 0
    return np.where(top, alpha < c, alpha > 0), np.where(top, alpha > 0, alpha < c)


def _max_violation(alpha: np.ndarray, score: np.ndarray, sign: np.ndarray, c: float) -> float:
    up, low = _up_low(alpha, sign, c)
    return float(np.max(np.where(up, score, -np.inf)) - np.min(np.where(low, score, np.inf)))


def _rho(alpha: np.ndarray, score: np.ndarray, sign: np.ndarray, c: float) -> float:
    yg = -score
    free = (alpha > 0) & (alpha < c)
    if np.any(free):
        return float(np.mean(yg[free]))
    at_upper = alpha >= c
    ub_mask = (at_upper & (sign < 0)) | (~at_upper & (sign > 0))
    lb_mask = (at_upper & (sign > 0)) | (~at_upper & (sign < 0))
    ub = float(np.min(yg[ub_mask])) if np.any(ub_mask) else np.inf
    lb = float(np.max(yg[lb_mask])) if np.any(lb_mask) else -np.inf
    return (ub + lb) / 2.0


def _solve_dual(
    rows: KernelRows,
    z: np.ndarray,
    params: SvrParams,
    tol: float,
    max_iter: int,
    strict: bool = True,
) -> Tuple[np.ndarray, float, float, int]:
    """Return (beta, rho, gap, iterations) with f(x) = sum beta_i K(x_i, x) - rho.

    Variables 0..n-1 hold the upper tube side, n..2n-1 the lower one. `score`
    is -y * gradient, kept in step with K @ beta instead of being rebuilt.
    """
    n = z.shape[0]
    c, p = params.t, params.p
    sign = np.concatenate([np.ones(n), -np.ones(n)])
    alpha = np.zeros(2 * n)
    score = np.concatenate([z - p, z + p])
    up, low = _up_low(alpha, sign, c)

    iteration = 0
    gap = np.inf
    while True:
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        diff = np.where(low, up_scores[i] - score, -np.inf)
        gap = float(np.max(diff))
        if gap < tol:
            break
        if iteration >= max_iter:
            if strict:
                raise ConvergenceError(f"SMO stopped after {max_iter} iterations", duality_gap=gap)
            logger.warning("SMO capped at %d iterations (gap %.3e)", max_iter, gap)
            break
        iteration += 1

        # second-order pick of j; the RBF kernel has a unit diagonal
        k_i = rows.row(i % n)
        quad = np.maximum(2.0 - 2.0 * np.concatenate([k_i, k_i]), _TAU)
        gain = np.where(diff > 0.0, diff * diff / quad, -np.inf)
        j = int(np.argmax(gain))
        k_j = rows.row(j % n)

        q_ij = sign[i] * sign[j] * k_i[j % n]
        g_i, g_j = -sign[i] * score[i], -sign[j] * score[j]
        old_i, old_j = alpha[i], alpha[j]
        if sign[i] != sign[j]:
            delta = (-g_i - g_j) / max(2.0 + 2.0 * q_ij, _TAU)
            spread = old_i - old_j
            alpha[i] += delta
            alpha[j] += delta
            if spread > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, spread
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -spread
            if spread > 0:
                if alpha[i] > c:
                    alpha[i], alpha[j] = c, c - spread
            elif alpha[j] > c:
                alpha[j], alpha[i] = c, c + spread
        else:
            delta = (g_i - g_j) / max(2.0 - 2.0 * q_ij, _TAU)
            total = old_i + old_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > c:
                if alpha[i] > c:
                    alpha[i], alpha[j] = c, total - c
                if alpha[j] > c:
                    alpha[j], alpha[i] = c, total - c
            else:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, total
                if alpha[i] < 0:
                    alpha[i], alpha[j] = 0.0, total

        step = sign[i] * (alpha[i] - old_i) * k_i + sign[j] * (alpha[j] - old_j) * k_j
        score[:n] -= step
        score[n:] -= step
        for index in (i, j):
            top = sign[index] > 0
            up[index] = alpha[index] < c if top else alpha[index] > 0
            low[index] = alpha[index] > 0 if top else alpha[index] < c

    logger.debug("SMO finished in %d iterations (gap %.3e)", iteration, gap)
    beta = alpha[:n] - alpha[n:]
    return beta, _rho(alpha, score, sign, c), gap, iteration


def fit_svr(
    data: TrainSet,
    params: SvrParams,
    tol: float = 1e-3,
    max_iter: int = 10_000_000,
    *,
    cache_rows: int = 4096,
    strict: bool = True,
) -> SvrModel:
    """Train without the minimum-row check (used by cross-validation).

    With `strict` off, hitting `max_iter` keeps the current iterate instead
    of raising.
    """
    lo, hi = feature_ranges(data.features)
    template = SvrModel(np.empty((0, data.features.shape[1])), np.empty(0), 0.0, params.k, lo, hi)
    scaled = template.normalize(data.features)
    rows = KernelRows(scaled, params.k, cache_rows)
    beta, rho, gap, iterations = _solve_dual(rows, data.labels, params, tol, max_iter, strict)
    keep = beta != 0
    meta = {
        "rows": len(data),
        "fingerprint": data.fingerprint(),
        "t": params.t,
        "p": params.p,
        "k": params.k,
        "kkt_gap": max(gap, 0.0),
        "iterations": iterations,
    }
    return SvrModel(
        support_vectors=scaled[keep],
        dual_coefs=beta[keep],
        bias=-rho,
        gamma=params.k,
        norm_lo=lo,
        norm_hi=hi,
        meta=meta,
    )


def train(data: TrainSet, hyper: Optional[SvrParams] = None, settings: SvrSettings = SvrSettings()) -> SvrModel:
    hyper = hyper or SvrParams.from_settings(settings)
    if len(data) < settings.min_rows:
        raise DatasetError(f"Training needs at least {settings.min_rows} rows, got {len(data)}")
    model = fit_svr(data, hyper, settings.tol, settings.max_iter, cache_rows=settings.cache_rows)
    logger.info("Trained SVR on %d rows: %d support vectors, bias %.6f", len(data), model.dual_coefs.size, model.bias)
    return model


@dataclass(frozen=True)
class GridResult:
    best: SvrParams
    rmse: float
    table: Tuple[Tuple[SvrParams, float], ...]


def fold_assignment(n: int, folds: int, seed: int, groups: Optional[Sequence[str]] = None) -> np.ndarray:
    """Deterministic fold index per row; rows of one group share a fold."""
    rng = make_rng(seed)
    if groups is not None:
        names, inverse = np.unique(np.asarray(groups), return_inverse=True)
        if names.size >= folds:
            return (rng.permutation(names.size) % folds)[inverse]
        logger.warning("Only %d groups for %d folds; assigning folds per row", names.size, folds)
    return rng.permutation(n) % folds


def cross_validate(
    data: TrainSet,
    params: SvrParams,
    folds: np.ndarray,
    settings: SvrSettings = SvrSettings(),
    max_iter: Optional[int] = None,
) -> float:
    """Cross-validated RMSE for one hyperparameter triple; fits stop at `max_iter`."""
    cap = max_iter if max_iter is not None else settings.max_iter
    predictions = np.empty(len(data))
    for fold in np.unique(folds):
        held_out = folds == fold
        model = fit_svr(
            data.subset(np.flatnonzero(~held_out)),
            params,
            settings.tol,
            cap,
            cache_rows=settings.cache_rows,
            strict=False,
        )
        predictions[held_out] = model.predict(data.features[held_out])
    return float(np.sqrt(np.mean((predictions - data.labels) ** 2)))


def grid_search(
    data: TrainSet,
    grid: GridSettings = GridSettings(),
    settings: SvrSettings = SvrSettings(),
    seed: int = 0,
    runner: Optional[BatchRunner] = None,
) -> GridResult:
    """Minimal-RMSE triple over the t x k x p grid; ties keep the first in grid order.

    Folds follow the group column when there is one, so a source never sits
    on both sides of a split.
    """
    if len(data) < grid.folds:
        raise DatasetError(f"Grid search needs at least {grid.folds} rows")
    folds = fold_assignment(len(data), grid.folds, seed, data.groups)
    combos = [SvrParams(t=t, p=p, k=k) for t, k, p in product(grid.t_values, grid.k_values, grid.p_values)]
    runner = runner or BatchRunner(1)
    scores = runner.map(lambda params: cross_validate(data, params, folds, settings, grid.max_iter), combos)
    table = tuple(zip(combos, scores))
    for params, rmse in table:
        logger.debug("grid t=%g k=%g p=%g rmse=%.6f", params.t, params.k, params.p, rmse)
    best, best_rmse = min(table, key=lambda item: item[1])
    logger.info("Grid search picked t=%g k=%g p=%g (rmse %.6f)", best.t, best.k, best.p, best_rmse)
    return GridResult(best=best, rmse=best_rmse, table=table)


def kkt_gap(model: SvrModel, data: TrainSet, params: SvrParams) -> float:
    """Maximal KKT violation of a trained model on its training data."""
    scaled = model.normalize(data.features)
    decision = model.decision(scaled)
    beta = np.zeros(len(data))
    # support vectors map back to their rows by exact match
    for vector, coef in zip(model.support_vectors, model.dual_coefs):
        rows = np.flatnonzero(np.all(scaled == vector, axis=1))
        beta[rows[np.argmin(np.abs(beta[rows]))]] += coef
    alpha = np.concatenate([np.maximum(beta, 0.0), np.maximum(-beta, 0.0)])
    sign = np.concatenate([np.ones(len(data)), -np.ones(len(data))])
    residual = data.labels - (decision - model.bias)
    score = np.concatenate([residual - params.p, residual + params.p])
    return _max_violation(alpha, score, sign, params.t)


__all__ = [
    "SvrParams",
    "TrainSet",
    "SvrModel",
    "GridResult",
    "KernelRows",
    "train",
    "fit_svr",
    "predict",
    "rbf_kernel",
    "fold_assignment",
    "cross_validate",
    "grid_search",
    "kkt_gap",
]
