from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable, List

import numpy as np

from biqme.constants import CSV_SIGNIFICANT_DIGITS, IMAGE_SUFFIXES
from biqme.errors import MissingFileError


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator; every random draw in the toolkit goes through one of these."""
    return np.random.default_rng(seed)


def format_float(value: float, digits: int = CSV_SIGNIFICANT_DIGITS) -> str:
    return f"{value:.{digits}g}"


def expand_image_paths(paths: Iterable[str | Path]) -> List[Path]:
    """Expand directories into their image files (sorted); keep file order otherwise."""
    expanded: List[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            expanded.extend(sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES))
        elif path.is_file():
            expanded.append(path)
        else:
            raise MissingFileError(f"No such image or directory: {path}")
    return expanded


__all__ = ["sha256_hex", "make_rng", "format_float", "expand_image_paths"]
