"""
Machine-readable output records: pydantic models, JSON schemas and the
JSON-lines codec shared by every command.
"""

from .framing import decode_record, encode_record, iter_records, write_records
from .messages import (
    RECORD_MODELS,
    BaseRecord,
    CpcqiRecord,
    EnhanceSidecar,
    EvalReportRecord,
    Evaluation,
    ManifestRecord,
    RecordType,
    ScoreRecord,
    TrainReport,
    parse_record,
)
from .validator import load_schema, validate_record

__all__ = [
    "RecordType",
    "BaseRecord",
    "ScoreRecord",
    "CpcqiRecord",
    "Evaluation",
    "EnhanceSidecar",
    "ManifestRecord",
    "TrainReport",
    "EvalReportRecord",
    "RECORD_MODELS",
    "parse_record",
    "encode_record",
    "decode_record",
    "write_records",
    "iter_records",
    "load_schema",
    "validate_record",
]
