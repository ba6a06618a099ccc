from __future__ import annotations

import csv
import logging
import math
from dataclasses import astuple, dataclass, fields
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from biqme.constants import ENCODING, FEATURE_COLUMNS, FEATURE_COUNT, GROUP_COLUMN, LABEL_COLUMN, PATH_COLUMN
from biqme.errors import DatasetError, DegenerateInputError, MissingFileError
from biqme.imaging import RasterImage, to_gray
from biqme.settings import DEFAULT_CONFIG, ToolkitConfig
from biqme.utils import format_float

from .contrast import contrast_energy
from .global_stats import GgdFit, brightness_entropies, colorfulness_pair, dark_channel_mean, ggd_fit, mscn
from .phase_congruency import LogGaborBank, build_bank, pc_entropy, pc_map
from .wavelet import dwt97_3level, log_energy

logger = logging.getLogger(__name__)

DEGENERATE_NU = 2.0


class FeatureFamily(StrEnum):
    CONTRAST = "contrast"
    SHARPNESS = "sharpness"
    BRIGHTNESS = "brightness"
    COLORFULNESS = "colorfulness"
    NATURALNESS = "naturalness"


ALL_FAMILIES = frozenset(FeatureFamily)


@dataclass(frozen=True)
class FeatureVector:
    """The 17 features in column order f01..f17, plus fit diagnostics."""

    e_pc: float
    ce_gr: float
    ce_yb: float
    ce_rg: float
    le_2: float
    le_3: float
    e_m1: float
    e_m2: float
    e_m3: float
    e_m4: float
    e_m5: float
    e_m6: float
    saturation: float
    colorfulness: float
    nu: float
    sigma2: float
    dark_channel: float
    ggd_clamped: bool = False
    ggd_degenerate: bool = False

    @classmethod
    def from_array(cls, values: Sequence[float], **flags: bool) -> "FeatureVector":
        if len(values) != FEATURE_COUNT:
            raise DatasetError(f"Feature vector needs {FEATURE_COUNT} values, got {len(values)}")
        return cls(*(float(v) for v in values), **flags)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self)[:FEATURE_COUNT], dtype=np.float64)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(FEATURE_COLUMNS, self.as_array().tolist()))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))


FEATURE_NAMES = tuple(f.name for f in fields(FeatureVector))[:FEATURE_COUNT]

FAMILY_COLUMNS: Dict[FeatureFamily, tuple[str, ...]] = {
    FeatureFamily.CONTRAST: FEATURE_COLUMNS[0:4],
    FeatureFamily.SHARPNESS: FEATURE_COLUMNS[4:6],
    FeatureFamily.BRIGHTNESS: FEATURE_COLUMNS[6:12],
    FeatureFamily.COLORFULNESS: FEATURE_COLUMNS[12:14],
    FeatureFamily.NATURALNESS: FEATURE_COLUMNS[14:17],
}


class FeatureExtractor:
    """Computes feature vectors with one immutable log-Gabor bank per config."""

    def __init__(self, config: ToolkitConfig = DEFAULT_CONFIG) -> None:
        self.config = config
        self.bank: LogGaborBank = build_bank(config.pc)

    def extract(self, img: RasterImage, families: Optional[Iterable[str]] = None) -> FeatureVector:
        """17 features in column order; skipped families are NaN."""
        cfg = self.config
        img.require_min_size(cfg.image.min_side)
        wanted = ALL_FAMILIES if families is None else frozenset(FeatureFamily(f) for f in families)
        gray = to_gray(img)
        nan = math.nan
        values: Dict[str, float] = {}
        flags = {"ggd_clamped": False, "ggd_degenerate": False}

        if FeatureFamily.CONTRAST in wanted:
            values["e_pc"] = pc_entropy(gray, pc_map(gray, self.bank), cfg.pc.top_fraction)
            values["ce_gr"], values["ce_yb"], values["ce_rg"] = contrast_energy(img, cfg.ce)
        if FeatureFamily.SHARPNESS in wanted:
            values["le_2"], values["le_3"] = log_energy(dwt97_3level(gray), cfg.dwt.hh_weight)
        if FeatureFamily.BRIGHTNESS in wanted:
            entropies = brightness_entropies(gray, cfg.brightness)
            values.update({f"e_m{i}": e for i, e in enumerate(entropies, start=1)})
        if FeatureFamily.COLORFULNESS in wanted:
            if img.is_color:
                values["saturation"], values["colorfulness"] = colorfulness_pair(img, cfg.color.kappa)
            else:
                values["saturation"], values["colorfulness"] = 0.0, 0.0
        if FeatureFamily.NATURALNESS in wanted:
            fit = self._naturalness_fit(gray)
            values["nu"], values["sigma2"] = fit.nu, fit.sigma2
            flags = {"ggd_clamped": fit.clamped, "ggd_degenerate": fit.degenerate}
            values["dark_channel"] = dark_channel_mean(img) if img.is_color else float(np.mean(gray)) / 255.0

        return FeatureVector(**{name: values.get(name, nan) for name in FEATURE_NAMES}, **flags)

    def _naturalness_fit(self, gray: np.ndarray) -> GgdFit:
        coefficients = mscn(gray, self.config.mscn)
        try:
            return ggd_fit(coefficients, self.config.ggd)
        except DegenerateInputError:
            logger.warning("Flat MSCN field; using nu=%.1f sigma2=0", DEGENERATE_NU)
            return GgdFit(nu=DEGENERATE_NU, sigma2=0.0, degenerate=True)


@lru_cache(maxsize=1)
def _default_extractor() -> FeatureExtractor:
    return FeatureExtractor(DEFAULT_CONFIG)


def extract_features(
    img: RasterImage,
    families: Optional[Iterable[str]] = None,
    config: Optional[ToolkitConfig] = None,
) -> FeatureVector:
    extractor = _default_extractor() if config is None else FeatureExtractor(config)
    return extractor.extract(img, families)


@dataclass(frozen=True)
class FeatureRow:
    """One row of the feature CSV."""

    path: str
    features: FeatureVector
    label: Optional[float] = None
    group: Optional[str] = None


def write_feature_rows(
    handle: TextIO,
    rows: Sequence[FeatureRow],
    columns: Optional[Sequence[str]] = None,
) -> None:
    """Write `path,f01..f17[,label][,group]` to a text stream; `columns` restricts the feature columns."""
    feature_columns = list(columns) if columns is not None else list(FEATURE_COLUMNS)
    unknown = set(feature_columns) - set(FEATURE_COLUMNS)
    if unknown:
        raise DatasetError(f"Unknown feature columns {sorted(unknown)}")
    with_label = any(row.label is not None for row in rows)
    with_group = any(row.group is not None for row in rows)
    header = [PATH_COLUMN, *feature_columns]
    if with_label:
        header.append(LABEL_COLUMN)
    if with_group:
        header.append(GROUP_COLUMN)

    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        named = row.features.as_dict()
        record = [row.path, *(format_float(named[c]) for c in feature_columns)]
        if with_label:
            if row.label is None:
                raise DatasetError(f"Row {row.path} has no label")
            record.append(format_float(row.label))
        if with_group:
            record.append(row.group or "")
        writer.writerow(record)


def write_feature_csv(
    path: str | Path,
    rows: Sequence[FeatureRow],
    columns: Optional[Sequence[str]] = None,
) -> None:
    with Path(path).open("w", encoding=ENCODING, newline="") as handle:
        write_feature_rows(handle, rows, columns)


def read_feature_csv(path: str | Path, require_label: bool = False) -> List[FeatureRow]:
    """Read a feature CSV; absent feature columns come back as NaN."""
    csv_path = Path(path)
    if not csv_path.is_file():
        raise MissingFileError(f"Feature CSV not found: {csv_path}")
    rows: List[FeatureRow] = []
    with csv_path.open("r", encoding=ENCODING, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        if PATH_COLUMN not in header or not any(c in header for c in FEATURE_COLUMNS):
            raise DatasetError(f"{csv_path}: missing '{PATH_COLUMN}' or feature columns")
        if require_label and LABEL_COLUMN not in header:
            raise DatasetError(f"{csv_path}: missing '{LABEL_COLUMN}' column")
        for line_no, record in enumerate(reader, start=2):
            try:
                values = [float(record[c]) if c in record else math.nan for c in FEATURE_COLUMNS]
                label = float(record[LABEL_COLUMN]) if record.get(LABEL_COLUMN) not in (None, "") else None
            except (TypeError, ValueError) as exc:
                raise DatasetError(f"{csv_path}:{line_no}: {exc}") from exc
            if require_label and (label is None or not math.isfinite(label)):
                raise DatasetError(f"{csv_path}:{line_no}: label missing or not finite")
            group = record.get(GROUP_COLUMN) or None
            rows.append(FeatureRow(record[PATH_COLUMN], FeatureVector.from_array(values), label, group))
    logger.debug("Read %d feature rows from %s", len(rows), csv_path)
    return rows


__all__ = [
    "FeatureFamily",
    "FeatureVector",
    "FeatureRow",
    "FeatureExtractor",
    "FEATURE_NAMES",
    "FAMILY_COLUMNS",
    "extract_features",
    "write_feature_rows",
    "write_feature_csv",
    "read_feature_csv",
]
