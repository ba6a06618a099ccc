from __future__ import annotations

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from biqme.errors import RecordError


class RecordType(StrEnum):
    """Kinds of JSON-lines records the toolkit emits."""

    SCORE = "score"
    CPCQI = "cpcqi"
    ENHANCE = "enhance"
    MANIFEST = "manifest"
    TRAIN_REPORT = "train_report"
    EVAL_REPORT = "eval_report"


class BaseRecord(BaseModel):
    """Envelope shared by every record; `record` selects the schema."""

    model_config = ConfigDict(extra="forbid")

    record: RecordType

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BaseRecord":
        try:
            return cls(**data)
        except ValidationError as exc:
            raise RecordError(f"Record validation failed: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


class ScoreRecord(BaseRecord):
    record: RecordType = Field(default=RecordType.SCORE, frozen=True)
    path: str
    score: float
    degenerate: bool = False


class CpcqiRecord(BaseRecord):
    record: RecordType = Field(default=RecordType.CPCQI, frozen=True)
    reference: str
    distorted: str
    score: float


class Evaluation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    stage: str
    params: Dict[str, float]
    score: float


class EnhanceSidecar(BaseRecord):
    record: RecordType = Field(default=RecordType.ENHANCE, frozen=True)
    input: str
    output: str
    method: str
    lambda_b: Optional[float] = None
    lambda_e: Optional[float] = None
    lambda_s: Optional[float] = None
    evaluations: List[Evaluation] = Field(default_factory=list)
    degenerate: bool = False
    config: Dict[str, Any] = Field(default_factory=dict)


class ManifestRecord(BaseRecord):
    """One generated training row; the first record of a manifest also carries the config."""

    record: RecordType = Field(default=RecordType.MANIFEST, frozen=True)
    row: str
    source_path: str
    source_hash: str
    op: str
    params: Dict[str, float] = Field(default_factory=dict)
    label: float
    seed: int = 0
    config: Optional[Dict[str, Any]] = None


class TrainReport(BaseRecord):
    record: RecordType = Field(default=RecordType.TRAIN_REPORT, frozen=True)
    rows: int
    support_vectors: int
    t: float
    p: float
    k: float
    kkt_gap: float
    bias: float
    fingerprint: str
    model_path: str
    cv_rmse: Optional[float] = None
    cv_table: List[Tuple[float, float, float, float]] = Field(default_factory=list)
    self_predictions: Dict[str, float] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)


class EvalReportRecord(BaseRecord):
    record: RecordType = Field(default=RecordType.EVAL_REPORT, frozen=True)
    n: int
    plc: float
    srocc: float
    krcc: float
    rmse: float
    taus: List[float]
    linear_fallback: bool = False
    low_confidence: bool = False
    flags: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)


RECORD_MODELS: Dict[RecordType, type[BaseRecord]] = {
    RecordType.SCORE: ScoreRecord,
    RecordType.CPCQI: CpcqiRecord,
    RecordType.ENHANCE: EnhanceSidecar,
    RecordType.MANIFEST: ManifestRecord,
    RecordType.TRAIN_REPORT: TrainReport,
    RecordType.EVAL_REPORT: EvalReportRecord,
}


def parse_record(data: Dict[str, Any]) -> BaseRecord:
    """Instantiate the record model named by `data["record"]`."""
    try:
        model = RECORD_MODELS[RecordType(data.get("record", ""))]
    except ValueError as exc:
        raise RecordError(f"Unknown record type {data.get('record')!r}") from exc
    return model.from_dict(data)


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
]
