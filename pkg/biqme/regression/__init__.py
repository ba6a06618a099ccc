"""Epsilon-SVR regression from the 17 features to a quality score, plus model persistence."""

from .model_io import dumps_model, load_model, loads_model, save_model
from .scorer import BiqmeScorer
from .svr import (
    GridResult,
    KernelRows,
    SvrModel,
    SvrParams,
    TrainSet,
    cross_validate,
    fit_svr,
    fold_assignment,
    grid_search,
    kkt_gap,
    predict,
    rbf_kernel,
    train,
)

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
    "dumps_model",
    "loads_model",
    "save_model",
    "load_model",
    "BiqmeScorer",
]
