from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, TextIO

from biqme.errors import ErrorCode, ToolkitError
from biqme.settings import ToolkitConfig
from biqme.workers import BatchRunner

from .commands import Command, normalize_command

logger = logging.getLogger(__name__)


@dataclass
class CommandContext:
    """Per-invocation state handed to every handler."""

    config: ToolkitConfig
    stdout: TextIO = field(default_factory=lambda: sys.stdout)

    @property
    def seed(self) -> int:
        return self.config.runtime.seed

    @property
    def runner(self) -> BatchRunner:
        return BatchRunner(self.config.runtime.jobs)


Handler = Callable[[argparse.Namespace, CommandContext], int]


class CommandRouter:
    """Maps sub-commands to handlers."""

    def __init__(self) -> None:
        self._handlers: Dict[str, Handler] = {}

    def register(self, command: Command, handler: Handler) -> None:
        self._handlers[normalize_command(command)] = handler

    def commands(self) -> list[str]:
        return sorted(self._handlers)

    def dispatch(self, command: str, args: argparse.Namespace, ctx: CommandContext) -> int:
        handler = self._handlers.get(normalize_command(command))
        if handler is None:
            raise ToolkitError(f"Unknown command {command!r}", code=ErrorCode.USAGE)
        logger.debug("Dispatching %s", command)
        return handler(args, ctx)


__all__ = ["CommandContext", "CommandRouter", "Handler"]
