"""Run configuration: packaged defaults, an optional YAML file, then flags."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from grmkit.engine.covariance import Divisor
from grmkit.errors import IoFailureError, UsageError

THREADS_ENV = "GRMKIT_THREADS"
DEFAULTS_PATH = Path(__file__).parent / "data" / "defaults.json"


class RunConfig(BaseModel):
    """Settings shared by every command; echoed into each JSON output."""

    model_config = ConfigDict(extra="forbid", use_enum_values=True)

    method: str = "glasso"
    lam: float | None = Field(default=None, ge=0.0)
    cv_folds: int | None = Field(default=None, ge=2)
    grid_size: int = Field(default=20, ge=1)
    grid_ratio: float = Field(default=0.01, gt=0.0, le=1.0)
    tol: float = Field(default=1e-6, gt=0.0)
    max_iter: int = Field(default=500, ge=1)
    frobenius_weight: float = Field(default=0.0, ge=0.0)
    divisor: Divisor = Divisor.N
    k: int = Field(default=3, ge=1)
    seed: int = 20080101
    threads: int | None = Field(default=None, ge=1)
    trading_days: int = Field(default=252, ge=1)
    beta_band: tuple[float, float] = (0.5, 1.5)
    walk_length: int = Field(default=4, ge=1)
    communities: int = Field(default=11, ge=1)
    mixed_bounds: tuple[float, float] = (-2.0, 4.0)
    mixed_grid_size: int = Field(default=601, ge=1)
    output_dir: str = "grmkit_out"

    @field_validator("method")
    @classmethod
    def _known_method(cls, v: str) -> str:
        known = {"glasso", "concord", "exact_inverse", "pca", "exogenous", "spatial", "mixed"}
        if v not in known:
            raise ValueError(f"unknown method '{v}', expected one of {sorted(known)}")
        return v

    @model_validator(mode="after")
    def _ordered_pairs(self) -> RunConfig:
        if self.beta_band[0] > self.beta_band[1]:
            raise ValueError("beta_band must be (low, high)")
        if self.mixed_bounds[0] > self.mixed_bounds[1]:
            raise ValueError("mixed_bounds must be (low, high)")
        return self

    def resolved_threads(self) -> int:
        """--threads, else $GRMKIT_THREADS, else the CPU count."""
        if self.threads is not None:
            return self.threads
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                value = int(env)
            except ValueError as e:
                raise UsageError(f"{THREADS_ENV} must be an integer, got '{env}'") from e
            if value < 1:
                raise UsageError(f"{THREADS_ENV} must be positive, got {value}")
            return value
        return os.cpu_count() or 1

    def echo(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def default_settings() -> dict[str, Any]:
    with open(DEFAULTS_PATH) as f:
        data: dict[str, Any] = json.load(f)
    return data


def read_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise IoFailureError(f"Cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise UsageError(f"Config file {path} is not valid YAML: {e}") from e
    if not isinstance(data, dict):
        raise UsageError(f"Config file {path} must hold a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def load_config(
    config_path: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Defaults, then the YAML file, then non-``None`` overrides."""
    settings = default_settings()
    if config_path is not None:
        settings.update(read_config_file(config_path))
    settings.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**settings)
    except ValidationError as e:
        raise UsageError(f"Invalid configuration: {e}") from e
