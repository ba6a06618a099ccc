from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from biqme.constants import ENCODING
from biqme.enhance import agcwd_enhance, enhance, rice_enhance
from biqme.errors import DatasetError, MissingFileError, ProvenanceError, ToolkitError
from biqme.evaluation import (
    align_scores,
    evaluate,
    leave_one_group_out,
    read_mos,
    read_scores,
    split_validation,
)
from biqme.features import (
    FAMILY_COLUMNS,
    FeatureExtractor,
    FeatureFamily,
    FeatureRow,
    read_feature_csv,
    write_feature_csv,
    write_feature_rows,
)
from biqme.imaging import load_image, save_image
from biqme.quality import cpcqi_score
from biqme.records import (
    CpcqiRecord,
    EnhanceSidecar,
    Evaluation,
    ScoreRecord,
    TrainReport,
    encode_record,
    write_records,
)
from biqme.regression import (
    BiqmeScorer,
    SvrParams,
    TrainSet,
    grid_search,
    kkt_gap,
    load_model,
    save_model,
    train,
)
from biqme.trainset import Source, build_trainset, source_hashes, synthetic_sources, write_manifest
from biqme.utils import expand_image_paths

from .commands import Command
from .router import CommandContext, CommandRouter

logger = logging.getLogger(__name__)


def _emit(ctx: CommandContext, text: str) -> None:
    ctx.stdout.write(text if text.endswith("\n") else text + "\n")


def _params(args: argparse.Namespace, ctx: CommandContext) -> SvrParams:
    svr = ctx.config.svr
    return SvrParams(
        t=args.t if args.t is not None else svr.t,
        p=args.p if args.p is not None else svr.p,
        k=args.k if args.k is not None else svr.k,
    )


def _trainset(rows: List[FeatureRow], need_groups: bool = False) -> TrainSet:
    if need_groups and any(row.group is None for row in rows):
        raise DatasetError("Every row needs a group value")
    groups = tuple(row.group for row in rows) if all(row.group is not None for row in rows) else None
    return TrainSet(
        np.vstack([row.features.as_array() for row in rows]),
        np.array([row.label for row in rows], dtype=np.float64),
        groups,
    )


def parse_families(text: Optional[str]) -> Optional[List[FeatureFamily]]:
    if not text:
        return None
    try:
        return [FeatureFamily(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError as exc:
        raise ToolkitError(f"Unknown feature family in {text!r}; choose from {', '.join(FeatureFamily)}") from exc


def cmd_features(args: argparse.Namespace, ctx: CommandContext) -> int:
    paths = expand_image_paths(args.paths)
    extractor = FeatureExtractor(ctx.config)
    families = parse_families(args.families)

    def _row(path: Path) -> FeatureRow:
        logger.debug("Extracting features from %s", path)
        return FeatureRow(str(path), extractor.extract(load_image(path), families))

    rows = ctx.runner.map(_row, paths)
    columns = None
    if families is not None and args.drop_skipped:
        columns = sorted(c for family in families for c in FAMILY_COLUMNS[family])
    if args.out:
        write_feature_csv(args.out, rows, columns)
    else:
        write_feature_rows(ctx.stdout, rows, columns)
    logger.info("Wrote features for %d images", len(rows))
    return 0


def cmd_score(args: argparse.Namespace, ctx: CommandContext) -> int:
    paths = expand_image_paths(args.paths)
    scorer = BiqmeScorer(load_model(args.model), ctx.config)

    def _score(path: Path) -> ScoreRecord:
        features = scorer.extractor.extract(load_image(path))
        return ScoreRecord(path=str(path), score=scorer.score_features(features), degenerate=features.ggd_degenerate)

    records = ctx.runner.map(_score, paths)
    if args.out:
        with Path(args.out).open("w", encoding=ENCODING) as handle:
            write_records(handle, records)
    else:
        write_records(ctx.stdout, records)
    logger.info("Scored %d images", len(records))
    return 0


def cmd_cpcqi(args: argparse.Namespace, ctx: CommandContext) -> int:
    score = cpcqi_score(load_image(args.reference), load_image(args.distorted), ctx.config.cpcqi)
    record = CpcqiRecord(reference=str(args.reference), distorted=str(args.distorted), score=score)
    _emit(ctx, encode_record(record).decode(ENCODING))
    return 0


def cmd_gen(args: argparse.Namespace, ctx: CommandContext) -> int:
    if args.sources:
        sources = [Source(str(path), load_image(path)) for path in expand_image_paths(args.sources)]
    else:
        gen = ctx.config.gen
        sources = synthetic_sources(gen.synthetic_count, gen.synthetic_size, ctx.seed)
        logger.info("No sources given; using %d synthetic scenes", len(sources))
    rows, manifest = build_trainset(sources, ctx.config, args.per_op, ctx.seed, ctx.runner)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_feature_csv(out, rows)
    manifest_path = Path(args.manifest) if args.manifest else out.with_suffix(".manifest.jsonl")
    write_manifest(manifest_path, manifest)
    logger.info("Generated %d labeled rows from %d sources into %s", len(rows), len(sources), out)
    return 0


def cmd_train(args: argparse.Namespace, ctx: CommandContext) -> int:
    rows = read_feature_csv(args.csv, require_label=True)
    data = _trainset(rows)
    params = _params(args, ctx)
    cv_rmse: Optional[float] = None
    cv_table: List[Tuple[float, float, float, float]] = []
    if args.grid:
        result = grid_search(data, ctx.config.grid, ctx.config.svr, ctx.seed, ctx.runner)
        params, cv_rmse = result.best, result.rmse
        cv_table = [(entry.t, entry.p, entry.k, rmse) for entry, rmse in result.table]
    model = train(data, params, ctx.config.svr)
    save_model(model, args.out)
    predictions = model.predict(data.features)
    report = TrainReport(
        rows=len(data),
        support_vectors=int(model.dual_coefs.size),
        t=params.t,
        p=params.p,
        k=params.k,
        kkt_gap=max(kkt_gap(model, data, params), 0.0),
        bias=model.bias,
        fingerprint=data.fingerprint(),
        model_path=str(args.out),
        cv_rmse=cv_rmse,
        cv_table=cv_table,
        self_predictions={row.path: float(value) for row, value in zip(rows, predictions)},
        config=ctx.config.as_flat(),
    )
    line = encode_record(report)
    report_path = Path(args.report) if args.report else Path(f"{args.out}.report.json")
    report_path.write_bytes(line)
    _emit(ctx, line.decode(ENCODING))
    return 0


def _enhance_one(path: Path, args: argparse.Namespace, ctx: CommandContext, scorer: Optional[BiqmeScorer]) -> EnhanceSidecar:
    img = load_image(path)
    out_dir = Path(args.out)
    output = out_dir / f"{path.stem}.enhanced.png"
    cfg = ctx.config.boiem
    if args.method == "boiem":
        result = enhance(img, scorer, cfg)
        enhanced = result.image
        fields: Dict[str, object] = {
            "lambda_b": result.lambda_b,
            "lambda_e": result.lambda_e,
            "lambda_s": result.lambda_s,
            "evaluations": [Evaluation(stage=e.stage, params=e.params, score=e.score) for e in result.evaluations],
            "degenerate": result.degenerate,
        }
    elif args.method == "agcwd":
        lambda_b = args.lambda_b if args.lambda_b is not None else cfg.lambda_b_candidates[1]
        enhanced, lut = agcwd_enhance(img, lambda_b)
        fields = {"lambda_b": lambda_b, "degenerate": lut.degenerate}
    else:
        lambda_e = args.lambda_e if args.lambda_e is not None else cfg.lambda_pairs[1][0]
        lambda_s = args.lambda_s if args.lambda_s is not None else cfg.lambda_pairs[1][1]
        enhanced, _ = rice_enhance(img, lambda_e, lambda_s, cfg.rayleigh_scale)
        fields = {"lambda_e": lambda_e, "lambda_s": lambda_s}
    save_image(enhanced, output)
    sidecar = EnhanceSidecar(input=str(path), output=str(output), method=args.method, config=ctx.config.as_flat(), **fields)
    output.with_suffix(".json").write_bytes(encode_record(sidecar))
    logger.debug("Enhanced %s -> %s", path, output)
    return sidecar


def cmd_enhance(args: argparse.Namespace, ctx: CommandContext) -> int:
    paths = expand_image_paths(args.paths)
    scorer = None
    if args.method == "boiem":
        if not args.model:
            raise ToolkitError("--model is required for --method boiem")
        scorer = BiqmeScorer(load_model(args.model), ctx.config)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    sidecars = ctx.runner.map(lambda path: _enhance_one(path, args, ctx, scorer), paths)
    write_records(ctx.stdout, sidecars)
    logger.info("Enhanced %d images with %s", len(sidecars), args.method)
    return 0


def _resolve(name: str, base: Path) -> Path:
    path = Path(name)
    if path.is_file() or path.is_absolute():
        return path
    return base / path


def _check_overlap(mos: Dict[str, float], mos_path: Path, manifest_path: str) -> None:
    used = source_hashes(manifest_path)
    for name in mos:
        path = _resolve(name, mos_path.parent)
        if not path.is_file():
            raise MissingFileError(f"MOS image not found for the overlap check: {path}")
        if load_image(path).content_hash() in used:
            raise ProvenanceError(f"{name} was a training source in {manifest_path}")


def cmd_eval(args: argparse.Namespace, ctx: CommandContext) -> int:
    mos = read_mos(args.mos)
    if args.train_manifest:
        _check_overlap(mos, Path(args.mos), args.train_manifest)
    _, pairs = align_scores(read_scores(args.scores), mos)
    report = evaluate(pairs, ctx.config.eval, ctx.seed)
    _emit(ctx, report.format_table())
    if args.out:
        Path(args.out).write_bytes(encode_record(report.to_record(ctx.config.as_flat())))
    return 0


def cmd_validate(args: argparse.Namespace, ctx: CommandContext) -> int:
    data = _trainset(read_feature_csv(args.csv, require_label=True), need_groups=True)
    params = _params(args, ctx)
    evaluation = ctx.config.eval
    iterations = args.iterations if args.iterations is not None else evaluation.iterations
    summary = split_validation(data, params, iterations, evaluation.train_fraction, ctx.seed, ctx.config.svr, evaluation)
    lines = [
        f"{'split':<8}  {'PLC':>10}  {'SRC':>10}  {'KRC':>10}",
        f"{'median':<8}  {summary.plc:>10.6f}  {summary.srocc:>10.6f}  {summary.krcc:>10.6f}",
    ]
    if args.loo:
        loo = leave_one_group_out(data, params, ctx.config.svr, evaluation, ctx.seed).report
        lines.append(f"{'loo':<8}  {loo.plc:>10.6f}  {loo.srocc:>10.6f}  {loo.krcc:>10.6f}")
    _emit(ctx, "\n".join(lines))
    return 0


def build_router() -> CommandRouter:
    router = CommandRouter()
    router.register(Command.FEATURES, cmd_features)
    router.register(Command.SCORE, cmd_score)
    router.register(Command.CPCQI, cmd_cpcqi)
    router.register(Command.GEN, cmd_gen)
    router.register(Command.TRAIN, cmd_train)
    router.register(Command.ENHANCE, cmd_enhance)
    router.register(Command.EVAL, cmd_eval)
    router.register(Command.VALIDATE, cmd_validate)
    return router


__all__ = [
    "cmd_features",
    "cmd_score",
    "cmd_cpcqi",
    "cmd_gen",
    "cmd_train",
    "cmd_enhance",
    "cmd_eval",
    "cmd_validate",
    "build_router",
]
