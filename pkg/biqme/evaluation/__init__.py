"""Correlation benchmarking (PLC/SRC/KRC) and content-disjoint validation protocols."""

from .datasets import align_scores, read_mos, read_scores, read_value_csv
from .stats import EvalReport, LogisticFit, ScorePairs, evaluate, fit_logistic5, krcc, logistic5, pearson, plc, srocc
from .validation import LeaveOneGroupOut, SplitSummary, leave_one_group_out, pooled_mean, split_groups, split_validation

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
    "SplitSummary",
    "LeaveOneGroupOut",
    "split_groups",
    "split_validation",
    "leave_one_group_out",
    "pooled_mean",
    "read_value_csv",
    "read_mos",
    "read_scores",
    "align_scores",
]
