from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np

from biqme.constants import ENCODING, MODEL_MAGIC, MODEL_VERSION
from biqme.errors import MissingFileError, ModelFormatError, UnsupportedVersionError

from .svr import SvrModel

logger = logging.getLogger(__name__)

END_MARKER = "end"


def _floats(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def dumps_model(model: SvrModel) -> str:
    """Line-oriented text form; floats use repr so load(dump(m)) is bit-exact."""
    lines = [
        f"{MODEL_MAGIC} v{MODEL_VERSION}",
        f"gamma {float(model.gamma)!r}",
        f"bias {float(model.bias)!r}",
        f"n_features {model.n_features}",
        f"norm_lo {_floats(model.norm_lo)}",
        f"norm_hi {_floats(model.norm_hi)}",
        f"meta {json.dumps(model.meta, sort_keys=True, separators=(',', ':'))}",
        f"n_sv {model.dual_coefs.size}",
    ]
    for coef, vector in zip(model.dual_coefs, model.support_vectors):
        lines.append(f"sv {float(coef)!r} {_floats(vector)}")
    lines.append(END_MARKER)
    return "\n".join(lines) + "\n"


def _lines(data: bytes) -> Iterator[Tuple[int, str]]:
    """(byte offset, decoded line) pairs."""
    offset = 0
    for raw in data.splitlines(keepends=True):
        try:
            text = raw.decode(ENCODING).rstrip("\r\n")
        except UnicodeDecodeError as exc:
            raise ModelFormatError(f"Undecodable bytes: {exc.reason}", offset) from exc
        yield offset, text
        offset += len(raw)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self._lines = list(_lines(data))
        self._pos = 0
        self._eof = len(data)

    def next(self, key: str) -> Tuple[int, List[str]]:
        if self._pos >= len(self._lines):
            raise ModelFormatError(f"Truncated model file: expected '{key}'", self._eof)
        offset, text = self._lines[self._pos]
        self._pos += 1
        tokens = text.split(" ")
        if tokens[0] != key:
            raise ModelFormatError(f"Expected '{key}', found {text[:40]!r}", offset)
        return offset, tokens[1:]

    def rest(self, key: str) -> Tuple[int, str]:
        offset, tokens = self.next(key)
        return offset, " ".join(tokens)


def _parse_floats(tokens: List[str], count: int, offset: int, what: str) -> np.ndarray:
    if len(tokens) != count:
        raise ModelFormatError(f"{what}: expected {count} values, got {len(tokens)}", offset)
    try:
        return np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise ModelFormatError(f"{what}: {exc}", offset) from exc


def _parse_int(tokens: List[str], offset: int, what: str) -> int:
    try:
        (token,) = tokens
        return int(token)
    except ValueError as exc:
        raise ModelFormatError(f"{what}: {exc}", offset) from exc


def loads_model(data: bytes) -> SvrModel:
    reader = _Reader(data)
    offset, version = reader.next(MODEL_MAGIC)
    if len(version) != 1 or not version[0].startswith("v") or not version[0][1:].isdigit():
        raise ModelFormatError(f"Malformed header version {version!r}", offset)
    if int(version[0][1:]) != MODEL_VERSION:
        raise UnsupportedVersionError(f"Model version {version[0]} is not supported (expected v{MODEL_VERSION})")

    offset, tokens = reader.next("gamma")
    gamma = float(_parse_floats(tokens, 1, offset, "gamma")[0])
    offset, tokens = reader.next("bias")
    bias = float(_parse_floats(tokens, 1, offset, "bias")[0])
    offset, tokens = reader.next("n_features")
    n_features = _parse_int(tokens, offset, "n_features")
    offset, tokens = reader.next("norm_lo")
    norm_lo = _parse_floats(tokens, n_features, offset, "norm_lo")
    offset, tokens = reader.next("norm_hi")
    norm_hi = _parse_floats(tokens, n_features, offset, "norm_hi")
    offset, meta_text = reader.rest("meta")
    try:
        meta = json.loads(meta_text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"meta: {exc.msg}", offset) from exc
    offset, tokens = reader.next("n_sv")
    n_sv = _parse_int(tokens, offset, "n_sv")
    if n_sv < 0:
        raise ModelFormatError("n_sv must be nonnegative", offset)

    coefs = np.empty(n_sv)
    vectors = np.empty((n_sv, n_features))
    for index in range(n_sv):
        offset, tokens = reader.next("sv")
        row = _parse_floats(tokens, n_features + 1, offset, f"sv {index}")
        coefs[index] = row[0]
        vectors[index] = row[1:]
    reader.next(END_MARKER)
    return SvrModel(
        support_vectors=vectors,
        dual_coefs=coefs,
        bias=bias,
        gamma=gamma,
        norm_lo=norm_lo,
        norm_hi=norm_hi,
        meta=meta,
    )


def save_model(model: SvrModel, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_model(model).encode(ENCODING))
    logger.info("Saved model with %d support vectors to %s", model.dual_coefs.size, path)


def load_model(path: str | Path) -> SvrModel:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"Model file not found: {path}")
    return loads_model(path.read_bytes())


__all__ = ["dumps_model", "loads_model", "save_model", "load_model"]
