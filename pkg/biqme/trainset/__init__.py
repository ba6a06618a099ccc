"""Synthetic training-set generation: tone-operator variants labeled with C-PCQI."""

from .generator import (
    LabeledRow,
    Source,
    build_trainset,
    generate_variants,
    label_and_emit,
    read_manifest,
    source_hashes,
    synthetic_sources,
    write_manifest,
)
from .operators import PARAMETRIC_KINDS, EnhanceOp, OpKind, draw_ops, equalization_lut

__all__ = [
    "OpKind",
    "PARAMETRIC_KINDS",
    "EnhanceOp",
    "draw_ops",
    "equalization_lut",
    "Source",
    "LabeledRow",
    "generate_variants",
    "label_and_emit",
    "synthetic_sources",
    "build_trainset",
    "write_manifest",
    "read_manifest",
    "source_hashes",
]
