from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Dict, List, Tuple

from biqme.constants import ENCODING
from biqme.errors import DatasetError, MissingFileError
from biqme.records import ScoreRecord, decode_record

from .stats import ScorePairs

logger = logging.getLogger(__name__)

KEY_COLUMNS = ("image_path", "path")
MOS_COLUMN = "mos"
SCORE_COLUMNS = ("score", "objective")


def _require(path: str | Path) -> Path:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"File not found: {path}")
    return path


def read_value_csv(path: str | Path, value_columns: Tuple[str, ...]) -> Dict[str, float]:
    """Map image path -> value from a CSV with an `image_path` (or `path`) column."""
    path = _require(path)
    values: Dict[str, float] = {}
    with path.open("r", encoding=ENCODING, newline="") as handle:
        reader = csv.DictReader(handle, skipinitialspace=True)
        header = [name.strip() for name in reader.fieldnames or []]
        key = next((c for c in KEY_COLUMNS if c in header), None)
        column = next((c for c in value_columns if c in header), None)
        if key is None or column is None:
            raise DatasetError(f"{path}: need columns {KEY_COLUMNS[0]} and one of {value_columns}, got {header}")
        for line_no, record in enumerate(reader, start=2):
            record = {k.strip(): v for k, v in record.items() if k is not None}
            try:
                values[record[key].strip()] = float(record[column])
            except (TypeError, ValueError, AttributeError) as exc:
                raise DatasetError(f"{path}:{line_no}: {exc}") from exc
    return values


def read_mos(path: str | Path) -> Dict[str, float]:
    return read_value_csv(path, (MOS_COLUMN,))


def read_scores(path: str | Path) -> Dict[str, float]:
    """Objective scores from a CSV or from score JSON lines."""
    path = _require(path)
    if path.suffix.lower() not in (".jsonl", ".json"):
        return read_value_csv(path, SCORE_COLUMNS)
    scores: Dict[str, float] = {}
    with path.open("rb") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = decode_record(line)
            if not isinstance(record, ScoreRecord):
                raise DatasetError(f"{path}: expected score records, got {record.record}")
            scores[record.path] = record.score
    return scores


def align_scores(objective: Dict[str, float], mos: Dict[str, float]) -> Tuple[List[str], ScorePairs]:
    """Pair scores by image path in MOS file order; every MOS image must be scored."""
    missing = [name for name in mos if name not in objective]
    if missing:
        raise DatasetError(f"{len(missing)} MOS images have no objective score (first: {missing[0]})")
    names = list(mos)
    return names, ScorePairs([objective[n] for n in names], [mos[n] for n in names])


__all__ = ["read_value_csv", "read_mos", "read_scores", "align_scores"]
