from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import jsonschema

from biqme.errors import RecordError

from .messages import RecordType

SCHEMA_DIR = Path(__file__).parent / "schemas"

SCHEMA_REGISTRY: Dict[str, str] = {
    RecordType.SCORE.value: "score.json",
    RecordType.CPCQI.value: "cpcqi.json",
    RecordType.ENHANCE.value: "enhance.json",
    RecordType.MANIFEST.value: "manifest.json",
    RecordType.TRAIN_REPORT.value: "train_report.json",
    RecordType.EVAL_REPORT.value: "eval_report.json",
}


def _schema_path(record_type: str) -> Optional[Path]:
    filename = SCHEMA_REGISTRY.get(record_type)
    if not filename:
        return None
    path = SCHEMA_DIR / filename
    return path if path.exists() else None


@lru_cache(maxsize=16)
def load_schema(record_type: str) -> Optional[dict]:
    """Load the JSON schema for a record type if one is registered."""
    path = _schema_path(record_type)
    if not path:
        return None
    with path.open("r", encoding="utf-8") as fp:
        return json.load(fp)


def validate_record(record: Dict[str, Any], schema: Optional[dict] = None) -> None:
    if not schema:
        schema = load_schema(str(record.get("record", "")))
    if schema is None:
        raise RecordError(f"No schema for record type {record.get('record')!r}")
    try:
        jsonschema.validate(instance=record, schema=schema)
    except jsonschema.ValidationError as exc:
        raise RecordError(f"Schema validation failed: {exc.message}") from exc


__all__ = ["SCHEMA_DIR", "load_schema", "validate_record"]
