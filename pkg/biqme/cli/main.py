from __future__ import annotations

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence, TextIO

from biqme.errors import FileIOError, ToolkitError
from biqme.settings import load_config

from .commands import Command
from .handlers import build_router
from .router import CommandContext

logger = logging.getLogger(__name__)


def _add_svr_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t", type=float, help="SVR box constraint (config svr.t)")
    parser.add_argument("--p", type=float, help="epsilon-tube half-width (config svr.p)")
    parser.add_argument("--k", type=float, help="RBF kernel width (config svr.k)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="section.key = value config file")
    common.add_argument("--seed", type=int, help="seed for every random draw (default 0)")
    common.add_argument("--jobs", type=int, help="worker threads for batch commands")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")

    parser = argparse.ArgumentParser(prog="biqme", description="Blind image quality toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    features = sub.add_parser(Command.FEATURES, parents=[common], help="extract the 17 features per image")
    features.add_argument("paths", nargs="+")
    features.add_argument("--out", help="CSV path (default stdout)")
    features.add_argument("--families", help="comma-separated subset of feature families")
    features.add_argument("--drop-skipped", action="store_true", help="omit columns of skipped families")

    score = sub.add_parser(Command.SCORE, parents=[common], help="blind quality score per image")
    score.add_argument("paths", nargs="+")
    score.add_argument("--model", required=True)
    score.add_argument("--out", help="JSON-lines path (default stdout)")

    cpcqi = sub.add_parser(Command.CPCQI, parents=[common], help="full-reference contrast quality")
    cpcqi.add_argument("reference")
    cpcqi.add_argument("distorted")

    gen = sub.add_parser(Command.GEN, parents=[common], help="build a labeled training CSV")
    gen.add_argument("sources", nargs="*", help="source images (default: synthetic scenes)")
    gen.add_argument("--per-op", type=int, help="draws per parametric operator (config gen.per_op)")
    gen.add_argument("--out", required=True, help="training CSV path")
    gen.add_argument("--manifest", help="manifest path (default <out>.manifest.jsonl)")

    train = sub.add_parser(Command.TRAIN, parents=[common], help="train the quality regressor")
    train.add_argument("csv")
    train.add_argument("--out", required=True, help="model file path")
    train.add_argument("--grid", action="store_true", help="cross-validated grid search first")
    train.add_argument("--report", help="report path (default <out>.report.json)")
    _add_svr_options(train)

    enhance = sub.add_parser(Command.ENHANCE, parents=[common], help="contrast enhancement")
    enhance.add_argument("paths", nargs="+")
    enhance.add_argument("--out", required=True, help="output directory")
    enhance.add_argument("--model", help="model file (required for boiem)")
    enhance.add_argument("--method", choices=("boiem", "agcwd", "rice"), default="boiem")
    enhance.add_argument("--lambda-b", type=float)
    enhance.add_argument("--lambda-e", type=float)
    enhance.add_argument("--lambda-s", type=float)

    evaluate = sub.add_parser(Command.EVAL, parents=[common], help="PLC/SRC/KRC against MOS")
    evaluate.add_argument("scores", help="objective scores (CSV or score JSON lines)")
    evaluate.add_argument("mos", help="CSV with image_path,mos")
    evaluate.add_argument("--train-manifest", help="refuse MOS images used as training sources")
    evaluate.add_argument("--out", help="JSON report path")

    validate = sub.add_parser(Command.VALIDATE, parents=[common], help="content-disjoint validation")
    validate.add_argument("csv", help="labeled feature CSV with a group column")
    validate.add_argument("--iterations", type=int)
    validate.add_argument("--loo", action="store_true", help="also run leave-one-group-out")
    _add_svr_options(validate)
    return parser


def _runtime_overrides(args: argparse.Namespace) -> Dict[str, object]:
    overrides: Dict[str, object] = {}
    if args.seed is not None:
        overrides["runtime.seed"] = args.seed
    if args.jobs is not None:
        overrides["runtime.jobs"] = args.jobs
    if args.log_level is not None:
        overrides["runtime.log_level"] = args.log_level
    return overrides


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    try:
        config = load_config(args.config)
        overrides = _runtime_overrides(args)
        if overrides:
            config = config.with_overrides(overrides)
        logging.basicConfig(
            level=getattr(logging, config.runtime.log_level),
            stream=stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        return build_router().dispatch(args.command, args, CommandContext(config=config, stdout=stdout))
    except ToolkitError as exc:
        logger.debug("Command failed: %s", exc.to_payload())
        print(exc.one_line(), file=stderr)
        return exc.exit_status
    except OSError as exc:
        error = FileIOError(str(exc), path=str(exc.filename) if exc.filename else None)
        logger.debug("Command failed: %s", error.to_payload())
        print(error.one_line(), file=stderr)
        return error.exit_status


def run() -> None:
    raise SystemExit(main())


__all__ = ["build_parser", "main", "run"]
