"""
Quality-optimized two-stage enhancement.

Stage one picks the brightness-rectifying gamma curve, stage two the
histogram blend, each by maximizing the blind quality score over three
candidates; both stages work on the HSV value channel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from biqme.imaging import RasterImage, histogram, value_channel
from biqme.settings import BoiemSettings
from biqme.workers import BatchRunner

from .tone import GrayLut, agcwd_lut, histogram_match, rice_target_histogram

logger = logging.getLogger(__name__)

BoiemConfig = BoiemSettings

Scorer = Callable[[RasterImage], float]
EvaluateHook = Callable[[str, Dict[str, float], float], None]

BRIGHTNESS_STAGE = "brightness"
HISTOGRAM_STAGE = "histogram"


@dataclass(frozen=True)
class Evaluation:
    stage: str
    params: Dict[str, float]
    score: float


@dataclass(frozen=True, eq=False)
class EnhanceResult:
    image: RasterImage
    lambda_b: float
    lambda_e: float
    lambda_s: float
    score: float
    evaluations: Tuple[Evaluation, ...] = field(default_factory=tuple)
    degenerate: bool = False


def agcwd_enhance(img: RasterImage, lambda_b: float) -> Tuple[RasterImage, GrayLut]:
    lut = agcwd_lut(histogram(value_channel(img)), lambda_b)
    return lut.apply_value(img), lut


def rice_enhance(img: RasterImage, lambda_e: float, lambda_s: float, rayleigh_scale: float = 64.0) -> Tuple[RasterImage, GrayLut]:
    value = value_channel(img)
    target = rice_target_histogram(histogram(value), lambda_e, lambda_s, rayleigh_scale)
    lut = histogram_match(value, target)
    return lut.apply_value(img), lut


def _pick(
    stage: str,
    candidates: Sequence[Tuple[Dict[str, float], RasterImage]],
    scorer: Scorer,
    runner: BatchRunner,
    on_evaluate: Optional[EvaluateHook],
) -> Tuple[int, List[Evaluation]]:
    """Score every candidate; ties go to the first listed."""
    scores = runner.map(scorer, [image for _, image in candidates])
    evaluations: List[Evaluation] = []
    best = 0
    for index, ((params, _), score) in enumerate(zip(candidates, scores)):
        evaluations.append(Evaluation(stage, params, float(score)))
        if on_evaluate is not None:
            on_evaluate(stage, params, float(score))
        if score > scores[best]:
            best = index
    return best, evaluations


def enhance(
    img: RasterImage,
    scorer: Scorer,
    cfg: BoiemConfig = BoiemConfig(),
    on_evaluate: Optional[EvaluateHook] = None,
    runner: Optional[BatchRunner] = None,
) -> EnhanceResult:
    """Greedy two-stage search with exactly six score evaluations."""
    runner = runner or BatchRunner(1)

    stage_one = [agcwd_enhance(img, lam) for lam in cfg.lambda_b_candidates]
    best_b, first = _pick(
        BRIGHTNESS_STAGE,
        [({"lambda_b": lam}, out) for lam, (out, _) in zip(cfg.lambda_b_candidates, stage_one)],
        scorer,
        runner,
        on_evaluate,
    )
    rectified, rectify_lut = stage_one[best_b]

    stage_two = [rice_enhance(rectified, le, ls, cfg.rayleigh_scale)[0] for le, ls in cfg.lambda_pairs]
    best_pair, second = _pick(
        HISTOGRAM_STAGE,
        [({"lambda_e": le, "lambda_s": ls}, out) for (le, ls), out in zip(cfg.lambda_pairs, stage_two)],
        scorer,
        runner,
        on_evaluate,
    )
    lambda_e, lambda_s = cfg.lambda_pairs[best_pair]
    lambda_b = cfg.lambda_b_candidates[best_b]
    logger.debug(
        "BOIEM picked lambda_b=%g lambda_e=%g lambda_s=%g (score %.6f)",
        lambda_b,
        lambda_e,
        lambda_s,
        second[best_pair].score,
    )
    return EnhanceResult(
        image=stage_two[best_pair],
        lambda_b=lambda_b,
        lambda_e=lambda_e,
        lambda_s=lambda_s,
        score=second[best_pair].score,
        evaluations=tuple(first + second),
        degenerate=rectify_lut.degenerate,
    )


__all__ = [
    "BoiemConfig",
    "Evaluation",
    "EnhanceResult",
    "agcwd_enhance",
    "rice_enhance",
    "enhance",
]
