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
from typing import Union


class Command(StrEnum):
    """Sub-commands of the `biqme` entry point."""

    FEATURES = "features"
    SCORE = "score"
    CPCQI = "cpcqi"
    GEN = "gen"
    TRAIN = "train"
    ENHANCE = "enhance"
    EVAL = "eval"
    VALIDATE = "validate"


def normalize_command(command: Union[Command, str]) -> str:
    if isinstance(command, Command):
        return command.value
    return str(command).strip().lower()


__all__ = ["Command", "normalize_command"]
