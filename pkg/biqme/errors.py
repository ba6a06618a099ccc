from __future__ import annotations

from enum import IntEnum
from typing import Any, Dict, Optional


class ErrorCode(IntEnum):
    """Toolkit error codes. The hundreds digit selects the CLI exit status."""

    USAGE = 200
    CONFIG_INVALID = 201
    CONFIG_UNKNOWN_KEY = 202
    FILE_MISSING = 300
    IMAGE_FORMAT = 301
    IMAGE_SIZE = 302
    IMAGE_CHANNELS = 303
    DIMENSION_MISMATCH = 304
    INPUT_RANGE = 305
    FILE_IO = 306
    DATASET_INVALID = 400
    MODEL_FORMAT = 401
    MODEL_VERSION = 402
    PROVENANCE_OVERLAP = 403
    RECORD_INVALID = 404
    DEGENERATE_INPUT = 500
    NOT_CONVERGED = 501


class ToolkitError(Exception):
    """Structured toolkit exception carrying code + message + details."""

    default_code = ErrorCode.USAGE

    def __init__(self, message: str = "", code: Optional[ErrorCode] = None, **details: Any) -> None:
        self.code = code if code is not None else self.default_code
        self.message = message
        self.details: Dict[str, Any] = details
        super().__init__(f"{self.code.name} ({int(self.code)}): {message}")

    @property
    def exit_status(self) -> int:
        return int(self.code) // 100

    def to_payload(self) -> dict:
        """Map error into a record fragment consumable by scripts."""
        return {
            "error_code": int(self.code),
            "error_kind": type(self).__name__,
            "error_message": self.message,
            **self.details,
        }

    def one_line(self) -> str:
        text = " ".join(self.message.split())
        return f"error code={int(self.code)} kind={type(self).__name__} message={text}"


class ConfigError(ToolkitError):
    default_code = ErrorCode.CONFIG_INVALID


class MissingFileError(ToolkitError):
    default_code = ErrorCode.FILE_MISSING


class FileIOError(ToolkitError):
    """Reading or writing a file failed at the operating-system level."""

    default_code = ErrorCode.FILE_IO


class ImageFormatError(ToolkitError):
    default_code = ErrorCode.IMAGE_FORMAT


class ImageSizeError(ToolkitError):
    default_code = ErrorCode.IMAGE_SIZE


class ChannelError(ToolkitError):
    default_code = ErrorCode.IMAGE_CHANNELS


class DimensionMismatchError(ToolkitError):
    default_code = ErrorCode.DIMENSION_MISMATCH


class InputRangeError(ToolkitError):
    default_code = ErrorCode.INPUT_RANGE


class DatasetError(ToolkitError):
    default_code = ErrorCode.DATASET_INVALID


class ModelFormatError(ToolkitError):
    """Corrupt model file; `offset` is the byte offset of the offending line."""

    default_code = ErrorCode.MODEL_FORMAT

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (byte offset {offset})", offset=offset)
        self.offset = offset


class UnsupportedVersionError(ToolkitError):
    default_code = ErrorCode.MODEL_VERSION


class ProvenanceError(ToolkitError):
    default_code = ErrorCode.PROVENANCE_OVERLAP


class RecordError(ToolkitError):
    default_code = ErrorCode.RECORD_INVALID


class DegenerateInputError(ToolkitError):
    default_code = ErrorCode.DEGENERATE_INPUT


class ConvergenceError(ToolkitError):
    """Solver hit its iteration cap; carries the remaining duality gap."""

    default_code = ErrorCode.NOT_CONVERGED

    def __init__(self, message: str, duality_gap: float) -> None:
        super().__init__(f"{message} (duality gap {duality_gap:.3e})", duality_gap=duality_gap)
        self.duality_gap = duality_gap


__all__ = [
    "ErrorCode",
    "ToolkitError",
    "ConfigError",
    "MissingFileError",
    "FileIOError",
    "ImageFormatError",
    "ImageSizeError",
    "ChannelError",
    "DimensionMismatchError",
    "InputRangeError",
    "DatasetError",
    "ModelFormatError",
    "UnsupportedVersionError",
    "ProvenanceError",
    "RecordError",
    "DegenerateInputError",
    "ConvergenceError",
]
