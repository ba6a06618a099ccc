"""
Correlation benchmarking of objective scores against subjective ratings.

PLC is computed after mapping the objective scores through a five-parameter
logistic fitted by Nelder-Mead; SRC uses average ranks for ties and KRC is
Kendall's tau-b.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special, stats

from biqme.errors import DatasetError
from biqme.records import EvalReportRecord
from biqme.settings import EvalSettings
from biqme.utils import make_rng

logger = logging.getLogger(__name__)

MIN_PAIRS = 4
_ZERO_VARIANCE = 1e-15


@dataclass(frozen=True, eq=False)
class ScorePairs:
    objective: np.ndarray
    subjective: np.ndarray

    def __post_init__(self) -> None:
        q = np.array(self.objective, dtype=np.float64, copy=True).ravel()
        g = np.array(self.subjective, dtype=np.float64, copy=True).ravel()
        if q.shape != g.shape:
            raise DatasetError(f"Score lengths differ: {q.size} objective vs {g.size} subjective")
        if q.size < MIN_PAIRS:
            raise DatasetError(f"Need at least {MIN_PAIRS} score pairs, got {q.size}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(g))):
            raise DatasetError("Scores must be finite")
        object.__setattr__(self, "objective", q)
        object.__setattr__(self, "subjective", g)

    def __len__(self) -> int:
        return int(self.objective.size)


def logistic5(q: np.ndarray, taus: Sequence[float]) -> np.ndarray:
    t1, t2, t3, t4, t5 = taus
    q = np.asarray(q, dtype=np.float64)
    return t1 * (0.5 - special.expit(-t2 * (q - t3))) + t4 * q + t5


@dataclass(frozen=True)
class LogisticFit:
    taus: Tuple[float, float, float, float, float]
    rmse: float
    linear_fallback: bool = False

    def __call__(self, q: np.ndarray) -> np.ndarray:
        return logistic5(q, self.taus)


def _is_constant(x: np.ndarray) -> bool:
    return float(np.ptp(x)) <= _ZERO_VARIANCE * max(1.0, float(np.max(np.abs(x))))


def _rmse(pred: np.ndarray, target: np.ndarray) -> float:
    return float(np.sqrt(np.mean((pred - target) ** 2)))


def _linear_fit(q: np.ndarray, g: np.ndarray) -> LogisticFit:
    if _is_constant(q):
        slope, intercept = 0.0, float(np.mean(g))
    else:
        slope, intercept = (float(v) for v in np.polyfit(q, g, 1))
    taus = (0.0, 1.0, 0.0, slope, intercept)
    return LogisticFit(taus, _rmse(logistic5(q, taus), g), linear_fallback=True)


def fit_logistic5(pairs: ScorePairs, restarts: int = 20, seed: int = 0) -> LogisticFit:
    """Least-squares five-parameter logistic; best RMSE over jittered restarts."""
    q, g = pairs.objective, pairs.subjective
    linear = _linear_fit(q, g)
    if _is_constant(q):
        logger.warning("Constant objective scores; using the linear fallback")
        return linear

    slope, intercept = linear.taus[3], linear.taus[4]
    base = np.array([np.ptp(g) * (1.0 if slope >= 0 else -1.0), 1.0 / np.std(q), np.median(q), slope, intercept])

    def sse(taus: np.ndarray) -> float:
        return float(np.sum((logistic5(q, taus) - g) ** 2))

    rng = make_rng(seed)
    best: Optional[np.ndarray] = None
    best_sse = np.inf
    for restart in range(restarts):
        start = base.copy()
        if restart:
            start[1] *= float(np.exp(rng.normal(0.0, 0.5)))
            start[2] += float(rng.normal(0.0, 0.5 * np.std(q)))
        result = optimize.minimize(
            sse,
            start,
            method="Nelder-Mead",
            options={"maxiter": 20000, "maxfev": 40000, "xatol": 1e-10, "fatol": 1e-14, "adaptive": True},
        )
        if result.fun < best_sse:
            best, best_sse = result.x, float(result.fun)

    polished = optimize.least_squares(lambda t: logistic5(q, t) - g, best, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if 2.0 * polished.cost < best_sse:
        best = polished.x

    fit = LogisticFit(tuple(float(t) for t in best), _rmse(logistic5(q, best), g))
    if fit.rmse > linear.rmse or abs(pearson(fit(q), g)) < abs(pearson(q, g)):
        logger.warning("Logistic fit underperforms the linear map; using the linear fallback")
        return linear
    return fit


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Raw linear correlation; 0 when either side has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if _is_constant(x) or _is_constant(y):
        return 0.0
    return float(np.clip(stats.pearsonr(x, y)[0], -1.0, 1.0))


def plc(pairs: ScorePairs, fit: LogisticFit) -> float:
    return pearson(fit(pairs.objective), pairs.subjective)


def srocc(pairs: ScorePairs) -> float:
    if _is_constant(pairs.objective) or _is_constant(pairs.subjective):
        return 0.0
    return float(np.clip(stats.spearmanr(pairs.objective, pairs.subjective)[0], -1.0, 1.0))


def krcc(pairs: ScorePairs) -> float:
    if _is_constant(pairs.objective) or _is_constant(pairs.subjective):
        return 0.0
    return float(np.clip(stats.kendalltau(pairs.objective, pairs.subjective, variant="b")[0], -1.0, 1.0))


@dataclass(frozen=True)
class EvalReport:
    n: int
    plc: float
    srocc: float
    krcc: float
    fit: LogisticFit
    low_confidence: bool
    flags: Tuple[str, ...] = field(default_factory=tuple)

    def to_record(self, config: Optional[Dict[str, Any]] = None) -> EvalReportRecord:
        return EvalReportRecord(
            n=self.n,
            plc=self.plc,
            srocc=self.srocc,
            krcc=self.krcc,
            rmse=self.fit.rmse,
            taus=list(self.fit.taus),
            linear_fallback=self.fit.linear_fallback,
            low_confidence=self.low_confidence,
            flags=list(self.flags),
            config=config or {},
        )

    def format_table(self) -> str:
        rows = [
            ("n", f"{self.n:d}"),
            ("PLC", f"{self.plc:.6f}"),
            ("SRC", f"{self.srocc:.6f}"),
            ("KRC", f"{self.krcc:.6f}"),
            ("RMSE", f"{self.fit.rmse:.6f}"),
        ]
        if self.flags:
            rows.append(("flags", ",".join(self.flags)))
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value:>12}" for name, value in rows)


def evaluate(pairs: ScorePairs, settings: EvalSettings = EvalSettings(), seed: int = 0) -> EvalReport:
    flags: List[str] = []
    if _is_constant(pairs.subjective):
        flags.append("constant_subjective")
    if _is_constant(pairs.objective):
        flags.append("constant_objective")
    fit = fit_logistic5(pairs, settings.restarts, seed)
    if fit.linear_fallback:
        flags.append("linear_fallback")
    low_confidence = len(pairs) < settings.low_confidence_n
    if low_confidence:
        logger.warning("Only %d score pairs; correlations are low-confidence", len(pairs))
        flags.append("low_confidence")
    return EvalReport(
        n=len(pairs),
        plc=plc(pairs, fit),
        srocc=srocc(pairs),
        krcc=krcc(pairs),
        fit=fit,
        low_confidence=low_confidence,
        flags=tuple(flags),
    )


__all__ = [
    "ScorePairs",
    "LogisticFit",
    "EvalReport",
    "logistic5",
    "fit_logistic5",
    "pearson",
    "plc",
    "srocc",
    "krcc",
    "evaluate",
]
