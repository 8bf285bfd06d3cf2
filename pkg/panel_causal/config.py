# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Configuration Module

Centralized configuration management for the panel causal toolkit.

Two layers:
    - Settings: process-level knobs loaded from environment variables
      (log level, worker threads, default output directory).
    - RunConfig: per-run analysis parameters, validated with pydantic and
      loaded from a flat ``key = value`` config file (dotenv grammar) with
      command-line overrides on top.

Config file grammar:
    # comment
    input_path = data/sdr_long.csv
    variables = Pov, Health, Edu, Growth
    p = auto
    alpha = 0.05

Keys are lower snake case (hyphens are accepted), lists are comma-separated,
and unknown keys are rejected.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from panel_causal.errors import ConfigError

# Load environment variables on module import
load_dotenv()

logger = logging.getLogger(__name__)


@dataclass
class Settings:
    """
    Process-level settings loaded from the environment.

    Usage:
        settings = get_settings()
        settings.configure_logging()
    """

    log_level: str = "INFO"
    threads: int = 1
    output_dir: str = "results"
    float_format: str = "%.17g"

    def __post_init__(self):
        """Load from environment if not provided."""
        self.log_level = os.getenv("PANEL_CAUSAL_LOG_LEVEL", self.log_level).upper()
        self.threads = int(os.getenv("PANEL_CAUSAL_THREADS", str(self.threads)))
        self.output_dir = os.getenv("PANEL_CAUSAL_OUTPUT_DIR", self.output_dir)

    @classmethod
    def from_environment(cls) -> "Settings":
        """Create settings instance loaded from environment."""
        return cls()

    def configure_logging(self, level: Optional[str] = None) -> None:
        """Configure logging based on settings."""
        logging.basicConfig(
            level=getattr(logging, (level or self.log_level).upper(), logging.INFO),
            format="%(levelname)s:%(name)s:%(message)s",
        )

        # Third-party numerics are chatty at DEBUG
        logging.getLogger("matplotlib").setLevel(logging.WARNING)
        logging.getLogger("numexpr").setLevel(logging.WARNING)
        logging.getLogger("statsmodels").setLevel(logging.WARNING)


# Global singleton settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance (lazy loaded)."""
    global _settings
    if _settings is None:
        _settings = Settings.from_environment()
    return _settings


# =============================================================================
# RUN CONFIGURATION
# =============================================================================

_LIST_FIELDS = ("variables", "ordering", "tracked_pairs", "tau_max_sweep")


class RunConfig(BaseModel):
    """
    Validated parameters for one CLI run.

    Defaults mirror the published pipeline settings: p=2, tau_max=3,
    alpha=0.05, horizon=10, 200 bootstrap draws, 100 permutations,
    100 Monte Carlo replications.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_path: Optional[Path] = None
    groups_path: Optional[Path] = None
    layout: Literal["long", "wide"] = "long"
    variables: Optional[list[str]] = None
    group_column: Optional[str] = None
    preprocessed: bool = False

    max_missing_fraction: float = Field(0.40, ge=0.0, le=1.0)
    min_group_size: int = Field(5, ge=1)

    p: Union[int, Literal["auto"]] = 2
    p_max: int = Field(3, ge=1, le=12)
    tau_max: int = Field(3, ge=1, le=10)
    tau_max_sweep: list[int] = Field(default_factory=lambda: [2, 3, 4])
    alpha: float = Field(0.05, gt=0.0, lt=1.0)
    alpha_pc: Optional[float] = Field(None, gt=0.0, lt=1.0)
    horizon: int = Field(10, ge=0, le=100)
    ordering: Optional[list[str]] = None
    ridge: float = Field(0.0, ge=0.0)

    bootstrap_reps: int = Field(200, ge=2)
    permutation_reps: int = Field(100, ge=10)
    mc_reps: int = Field(100, ge=10)
    mc_entities: int = Field(168, ge=2)
    mc_variables: int = Field(8, ge=1)
    mc_years: int = Field(25, ge=4)
    mc_estimator: Literal["entity", "pooled"] = "entity"

    split_year: int = 2015
    tracked_pairs: list[str] = Field(default_factory=list)

    seed: int = Field(0, ge=0)
    threads: int = Field(1, ge=1)
    output_dir: Path = Path("results")

    @field_validator(*_LIST_FIELDS, mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("p", mode="before")
    @classmethod
    def _parse_lag(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = value.strip().lower()
            return value if value == "auto" else int(value)
        return value

    @field_validator("tracked_pairs")
    @classmethod
    def _check_pairs(cls, value: list[str]) -> list[str]:
        for pair in value:
            parts = pair.split(">")
            if len(parts) != 2 or not all(part.strip() for part in parts):
                raise ValueError(f"tracked pair '{pair}' must look like 'Source>Target'")
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if isinstance(self.p, int) and self.p < 1:
            raise ValueError("p must be >= 1 or 'auto'")
        if any(tau < 1 for tau in self.tau_max_sweep):
            raise ValueError("tau_max_sweep entries must be >= 1")
        return self

    @property
    def tracked(self) -> list[tuple[str, str]]:
        """Tracked pairs as (source, target) tuples."""
        return [tuple(part.strip() for part in pair.split(">")) for pair in self.tracked_pairs]  # type: ignore[misc]

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump; stable across runs."""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _normalise_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def read_config_file(path: Union[str, Path]) -> dict[str, str]:
    """Parse a flat key-value config file into a dict of raw strings."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    raw = dotenv_values(path)
    values = {_normalise_key(k): v for k, v in raw.items() if v is not None}
    logger.info(f"📦 Loaded {len(values)} config key(s) from {path}")
    return values


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Build a RunConfig from an optional config file plus overrides.

    Overrides (typically CLI flags) win over file keys; ``None`` overrides
    are ignored so unset flags never clobber the file.
    """
    values: dict[str, Any] = read_config_file(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[_normalise_key(key)] = value
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"Invalid configuration: {problems}") from e
