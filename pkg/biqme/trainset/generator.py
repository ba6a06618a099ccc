"""
Training-set synthesis.

Each source yields its reference row (label 1), `per_op` draws of each of the
seven parametric tone operators and one histogram-equalized variant, which
has no parameters to draw. That is 7 * per_op + 2 rows per source: 51 at the
default per_op of 7, so 20 sources give 1,020 rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import ndimage

from biqme.errors import DimensionMismatchError, MissingFileError, RecordError
from biqme.features import FeatureExtractor, FeatureRow
from biqme.imaging import RasterImage
from biqme.quality import cpcqi_score
from biqme.records import ManifestRecord, decode_record, encode_record
from biqme.settings import DEFAULT_CONFIG, GenSettings, ToolkitConfig
from biqme.utils import make_rng
from biqme.workers import BatchRunner

from .operators import EnhanceOp, OpKind, draw_ops

logger = logging.getLogger(__name__)

Variant = Tuple[RasterImage, EnhanceOp]


@dataclass(frozen=True, eq=False)
class Source:
    """A training source; `name` doubles as the CSV group id."""

    name: str
    image: RasterImage

    @property
    def content_hash(self) -> str:
        return self.image.content_hash()


def generate_variants(
    src: RasterImage,
    per_op: int = 7,
    seed: int = 0,
    cfg: GenSettings = GenSettings(),
    include_source: bool = True,
) -> List[Variant]:
    """Deterministic variants in (operator, draw) order; the source leads when included."""
    ops = draw_ops(per_op, make_rng(seed), cfg)
    variants: List[Variant] = [(src, EnhanceOp(OpKind.ORIGINAL))] if include_source else []
    variants.extend((op.apply(src), op) for op in ops)
    return variants


@dataclass(frozen=True)
class LabeledRow:
    row: FeatureRow
    op: EnhanceOp


def label_and_emit(
    variants: Sequence[Variant],
    reference: RasterImage,
    extractor: Optional[FeatureExtractor] = None,
    source_name: str = "source",
    runner: Optional[BatchRunner] = None,
) -> List[LabeledRow]:
    """Reference row (label 1) followed by one row per variant labeled with C-PCQI."""
    extractor = extractor or FeatureExtractor(DEFAULT_CONFIG)
    runner = runner or BatchRunner(1)
    for image, op in variants:
        if not image.same_geometry(reference):
            raise DimensionMismatchError(f"Variant {op.tag} does not match the reference geometry")
    items: List[Variant] = [(reference, EnhanceOp(OpKind.ORIGINAL)), *variants]
    cpcqi_cfg = extractor.config.cpcqi

    def _label(item: Variant) -> LabeledRow:
        image, op = item
        features = extractor.extract(image)
        label = cpcqi_score(reference, image, cpcqi_cfg)
        logger.debug("%s %s label=%.6f", source_name, op.tag, label)
        return LabeledRow(FeatureRow(f"{source_name}#{op.tag}", features, label, source_name), op)

    return runner.map(_label, items)


def synthetic_sources(count: int = 20, size: int = 128, seed: int = 0) -> List[Source]:
    """Seeded color scenes: a tilted gradient, soft color blobs and smoothed texture."""
    rng = make_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / float(size)
    sources: List[Source] = []
    for index in range(count):
        angle = rng.uniform(0.0, 2.0 * np.pi)
        ramp = np.cos(angle) * xx + np.sin(angle) * yy
        scene = np.empty((size, size, 3))
        for channel in range(3):
            scene[:, :, channel] = rng.uniform(40, 120) + rng.uniform(40, 100) * ramp
        for _ in range(int(rng.integers(3, 7))):
            cy, cx = rng.uniform(0, 1, size=2)
            radius = rng.uniform(0.05, 0.25)
            blob = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * radius**2))
            scene += blob[:, :, None] * rng.uniform(-80, 80, size=3)
        texture = ndimage.gaussian_filter(rng.normal(size=(size, size)), sigma=rng.uniform(0.7, 2.0))
        scene += (rng.uniform(8, 30) / (texture.std() + 1e-12)) * texture[:, :, None]
        sources.append(Source(f"synthetic-{index:02d}", RasterImage.from_float(scene)))
    return sources


def build_trainset(
    sources: Sequence[Source],
    config: ToolkitConfig = DEFAULT_CONFIG,
    per_op: Optional[int] = None,
    seed: int = 0,
    runner: Optional[BatchRunner] = None,
) -> Tuple[List[FeatureRow], List[ManifestRecord]]:
    """Rows ordered by (source, operator, draw), with one manifest entry per row.

    The first manifest entry echoes the flattened config.
    """
    extractor = FeatureExtractor(config)
    per_op = per_op if per_op is not None else config.gen.per_op
    rows: List[FeatureRow] = []
    manifest: List[ManifestRecord] = []
    for index, source in enumerate(sources):
        variants = generate_variants(source.image, per_op, seed + index, config.gen, include_source=False)
        labeled = label_and_emit(variants, source.image, extractor, source.name, runner)
        source_hash = source.content_hash
        for item in labeled:
            rows.append(item.row)
            manifest.append(
                ManifestRecord(
                    row=item.row.path,
                    source_path=source.name,
                    source_hash=source_hash,
                    op=str(item.op.kind),
                    params=item.op.params,
                    label=float(item.row.label),
                    seed=seed + index,
                    config=None if manifest else config.as_flat(),
                )
            )
        logger.info("Source %s: %d labeled rows", source.name, len(labeled))
    return rows, manifest


def write_manifest(path: str | Path, records: Sequence[ManifestRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        for record in records:
            handle.write(encode_record(record))


def read_manifest(path: str | Path) -> List[ManifestRecord]:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"Manifest not found: {path}")
    records: List[ManifestRecord] = []
    with path.open("rb") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = decode_record(line)
            if not isinstance(record, ManifestRecord):
                raise RecordError(f"{path}:{line_no}: expected a manifest record, got {record.record}")
            records.append(record)
    return records


def source_hashes(path: str | Path) -> Set[str]:
    return {record.source_hash for record in read_manifest(path)}


__all__ = [
    "Variant",
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
