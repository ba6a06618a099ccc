from .commands import Command
from .handlers import build_router
from .main import build_parser, main, run
from .router import CommandContext, CommandRouter

__all__ = ["Command", "CommandContext", "CommandRouter", "build_parser", "build_router", "main", "run"]
