from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError, ErrorCode, MissingFileError

logger = logging.getLogger(__name__)

ENV_PREFIX = "BIQME_"


class Section(BaseModel):
    """Base for every config section: immutable, unknown keys rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class ImageSettings(Section):
    min_side: int = Field(default=32, ge=32)


class PhaseCongruencySettings(Section):
    scales: int = Field(default=4, ge=2)
    orientations: int = Field(default=4, ge=2)
    min_wavelength: float = Field(default=6.0, ge=3.0)
    multiplier: float = Field(default=2.0, gt=1.0)
    sigma_on_f: float = Field(default=0.55, gt=0.0, lt=1.0)
    angular_ratio: float = Field(default=0.55, gt=0.0)
    k_noise: float = Field(default=2.0, ge=0.0)
    cutoff: float = Field(default=0.5, ge=0.0, le=1.0)
    gain: float = Field(default=10.0, gt=0.0)
    epsilon: float = Field(default=1e-4, gt=0.0)
    top_fraction: float = Field(default=0.4, gt=0.0, le=1.0)


class ContrastEnergySettings(Section):
    gauss_sigma: float = Field(default=1.0, gt=0.0)
    radius_factor: float = Field(default=3.0, gt=0.0)
    theta: float = Field(default=0.1, gt=0.0)
    phi_gr: float = Field(default=0.23, gt=0.0)
    phi_yb: float = Field(default=0.23, gt=0.0)
    phi_rg: float = Field(default=0.05, gt=0.0)


class WaveletSettings(Section):
    hh_weight: float = Field(default=4.0, ge=0.0)


class BrightnessSettings(Section):
    multipliers: Tuple[float, ...] = (3.5, 5.5, 7.5, 1 / 3.5, 1 / 5.5, 1 / 7.5)
    t_lower: float = 0.0
    t_upper: float = 255.0

    @field_validator("multipliers")
    @classmethod
    def _positive(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(value) != 6 or any(m <= 0 for m in value):
            raise ValueError("brightness needs exactly six positive multipliers")
        return value

    @model_validator(mode="after")
    def _bounds(self) -> "BrightnessSettings":
        if not self.t_lower < self.t_upper:
            raise ValueError("t_lower must be below t_upper")
        return self


class ColorSettings(Section):
    kappa: float = Field(default=0.3, ge=0.0)


class MscnSettings(Section):
    window: int = Field(default=7, ge=3)
    sigma: float = Field(default=7 / 6, gt=0.0)
    epsilon: float = Field(default=1.0, gt=0.0)

    @field_validator("window")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("mscn window must be odd")
        return value


class GgdSettings(Section):
    nu_min: float = Field(default=0.2, gt=0.0)
    nu_max: float = Field(default=10.0, gt=0.0)
    min_samples: int = Field(default=1000, ge=2)


class CpcqiSettings(Section):
    patch_size: int = Field(default=11, ge=3)
    stride: int = Field(default=4, ge=1)
    k1: float = Field(default=0.01, gt=0.0)
    k2: float = Field(default=0.03, gt=0.0)
    zeta: float = Field(default=1e-3, gt=0.0)
    phi: float = Field(default=1.0, gt=0.0)


class SvrSettings(Section):
    t: float = Field(default=256.0, gt=0.0)
    p: float = Field(default=0.01, gt=0.0)
    k: float = Field(default=1 / 17, gt=0.0)
    tol: float = Field(default=1e-3, gt=0.0)
    max_iter: int = Field(default=10_000_000, ge=1)
    cache_rows: int = Field(default=4096, ge=2)
    min_rows: int = Field(default=50, ge=1)


class GridSettings(Section):
    t_values: Tuple[float, ...] = (1.0, 16.0, 256.0, 4096.0)
    k_values: Tuple[float, ...] = tuple(2.0**e for e in range(-6, 3))
    p_values: Tuple[float, ...] = (0.005, 0.01, 0.05)
    folds: int = Field(default=5, ge=2)
    max_iter: int = Field(default=10_000, ge=1)


class GenSettings(Section):
    per_op: int = Field(default=7, ge=1)
    gamma_range: Tuple[float, float] = (0.3, 2.5)
    s_slope_range: Tuple[float, float] = (0.5, 3.0)
    shift_range: Tuple[float, float] = (-60.0, 60.0)
    arch_range: Tuple[float, float] = (0.1, 0.9)
    synthetic_count: int = Field(default=20, ge=1)
    synthetic_size: int = Field(default=128, ge=32)


class EvalSettings(Section):
    restarts: int = Field(default=20, ge=1)
    low_confidence_n: int = Field(default=20, ge=4)
    iterations: int = Field(default=1000, ge=1)
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)


class BoiemSettings(Section):
    lambda_b_candidates: Tuple[float, float, float] = (0.3, 0.5, 0.7)
    lambda_pairs: Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]] = (
        (1.0, 1.0),
        (4.0, 2.0),
        (8.0, 4.0),
    )
    rayleigh_scale: float = Field(default=64.0, gt=0.0)

    @field_validator("lambda_b_candidates")
    @classmethod
    def _lambda_b(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not 0.0 < lam <= 1.0 for lam in value):
            raise ValueError("lambda_b candidates must lie in (0, 1]")
        return value

    @field_validator("lambda_pairs")
    @classmethod
    def _pairs(cls, value: Tuple[Tuple[float, float], ...]) -> Tuple[Tuple[float, float], ...]:
        if any(lam <= 0 for pair in value for lam in pair):
            raise ValueError("lambda pairs must be positive")
        return value


class RuntimeSettings(Section):
    log_level: str = "INFO"
    jobs: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)

    @field_validator("log_level")
    @classmethod
    def _level(cls, value: str) -> str:
        level = value.upper()
        names = logging.getLevelNamesMapping() if hasattr(logging, "getLevelNamesMapping") else logging._nameToLevel
        if level not in names:
            raise ValueError(f"unknown log level {value}")
        return level


class ToolkitConfig(Section):
    """Every tunable of the toolkit; unset fields keep module defaults."""

    image: ImageSettings = ImageSettings()
    pc: PhaseCongruencySettings = PhaseCongruencySettings()
    ce: ContrastEnergySettings = ContrastEnergySettings()
    dwt: WaveletSettings = WaveletSettings()
    brightness: BrightnessSettings = BrightnessSettings()
    color: ColorSettings = ColorSettings()
    mscn: MscnSettings = MscnSettings()
    ggd: GgdSettings = GgdSettings()
    cpcqi: CpcqiSettings = CpcqiSettings()
    svr: SvrSettings = SvrSettings()
    grid: GridSettings = GridSettings()
    gen: GenSettings = GenSettings()
    eval: EvalSettings = EvalSettings()
    boiem: BoiemSettings = BoiemSettings()
    runtime: RuntimeSettings = RuntimeSettings()

    def as_flat(self) -> Dict[str, Any]:
        """`section.key -> value` mapping echoed into manifests for provenance."""
        flat: Dict[str, Any] = {}
        for section, values in self.model_dump(mode="json").items():
            for key, value in values.items():
                flat[f"{section}.{key}"] = value
        return flat

    def with_overrides(self, overrides: Dict[str, Any]) -> "ToolkitConfig":
        """Return a copy with `section.key` overrides applied and validated."""
        return build_config({**self.as_flat(), **overrides})


DEFAULT_CONFIG = ToolkitConfig()


def _coerce(value: Any) -> Any:
    if isinstance(value, str):
        text = value.strip()
        if text[:1] in ("[", "{"):
            try:
                return json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"Invalid list literal {text!r}: {exc}") from exc
        return text
    return value


def build_config(flat: Dict[str, Any]) -> ToolkitConfig:
    """Build a config from `section.key` entries; unknown keys are rejected."""
    sections: Dict[str, Dict[str, Any]] = {}
    known = ToolkitConfig.model_fields
    for dotted, value in flat.items():
        section, _, key = dotted.partition(".")
        if not key or section not in known:
            raise ConfigError(f"Unknown config key {dotted!r}", code=ErrorCode.CONFIG_UNKNOWN_KEY)
        sections.setdefault(section, {})[key] = _coerce(value)
    try:
        return ToolkitConfig(**sections)
    except ValidationError as exc:
        unknown = any(err["type"] == "extra_forbidden" for err in exc.errors())
        code = ErrorCode.CONFIG_UNKNOWN_KEY if unknown else ErrorCode.CONFIG_INVALID
        raise ConfigError(f"Config validation failed: {exc}", code=code) from exc


def _env_overrides() -> Dict[str, str]:
    overrides: Dict[str, str] = {}
    for name, value in os.environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        section, sep, key = name[len(ENV_PREFIX) :].partition("__")
        if sep:
            overrides[f"{section.lower()}.{key.lower()}"] = value
    return overrides


def load_config(path: Optional[str | Path] = None, env_path: str = ".env") -> ToolkitConfig:
    """Load config from an optional `section.key = value` file plus BIQME_* env vars."""
    if Path(env_path).exists():
        load_dotenv(env_path)
    flat: Dict[str, Any] = {}
    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise MissingFileError(f"Config file not found: {config_path}")
        flat.update({key: value for key, value in dotenv_values(config_path).items() if value is not None})
    flat.update(_env_overrides())
    config = build_config(flat)
    logger.debug("Loaded config with %d overrides", len(flat))
    return config


__all__ = [
    "ToolkitConfig",
    "ImageSettings",
    "PhaseCongruencySettings",
    "ContrastEnergySettings",
    "WaveletSettings",
    "BrightnessSettings",
    "ColorSettings",
    "MscnSettings",
    "GgdSettings",
    "CpcqiSettings",
    "SvrSettings",
    "GridSettings",
    "GenSettings",
    "EvalSettings",
    "BoiemSettings",
    "RuntimeSettings",
    "DEFAULT_CONFIG",
    "build_config",
    "load_config",
]
