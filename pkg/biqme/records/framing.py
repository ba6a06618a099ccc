from __future__ import annotations

import json
from typing import IO, Any, Dict, Iterator, List, Union

from biqme.constants import ENCODING, RECORD_DELIMITER
from biqme.errors import RecordError

from .messages import BaseRecord, parse_record
from .validator import validate_record


def encode_record(record: Union[BaseRecord, Dict[str, Any]]) -> bytes:
    """Validate and encode one record as compact JSON plus delimiter."""
    data = record.to_dict() if isinstance(record, BaseRecord) else record
    validate_record(data)
    try:
        text = json.dumps(data, ensure_ascii=False, separators=(",", ":"), allow_nan=False)
    except (TypeError, ValueError) as exc:
        raise RecordError(f"Encode failed: {exc}") from exc
    return text.encode(ENCODING) + RECORD_DELIMITER


def decode_record(data: bytes) -> BaseRecord:
    """Decode one delimited record and validate it."""
    try:
        parsed = json.loads(data.rstrip(RECORD_DELIMITER).decode(ENCODING))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise RecordError(f"Decode failed: {exc}") from exc
    if not isinstance(parsed, dict):
        raise RecordError("Record must be a JSON object")
    validate_record(parsed)
    return parse_record(parsed)


def write_records(stream: IO[str], records: List[BaseRecord]) -> None:
    for record in records:
        stream.write(encode_record(record).decode(ENCODING))


def iter_records(lines: Iterator[bytes]) -> Iterator[BaseRecord]:
    for line in lines:
        if line.strip():
            yield decode_record(line)


__all__ = ["encode_record", "decode_record", "write_records", "iter_records"]
