"""Output directory handling and model files shared by the command handlers."""

from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import pandas as pd

from grmkit import __version__
from grmkit.config import RunConfig
from grmkit.engine.factors import FactorModel
from grmkit.engine.grm import GrmModel
from grmkit.engine.interaction import MixedModel
from grmkit.engine.panel import (
    DistanceMatrix,
    FactorPanel,
    ReturnsPanel,
    SectorMap,
    load_distances,
    load_factors,
    load_returns,
    load_sector_map,
)
from grmkit.errors import GrmError, IoFailureError, UsageError

logger = logging.getLogger(__name__)

MODEL_KINDS = ("grm", "pca", "exogenous", "spatial", "mixed")

FittedModel = GrmModel | FactorModel | MixedModel


def metadata() -> dict[str, Any]:
    return {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
    }


class Workspace:
    """Reads inputs and writes every command's outputs under one directory."""

    def __init__(self, config: RunConfig, output_dir: Path | None = None):
        self.config = config
        self.output_dir = Path(output_dir) if output_dir is not None else Path(config.output_dir)

    def path(self, name: str | Path) -> Path:
        """Resolve ``name`` against the output directory unless it is absolute."""
        path = Path(name)
        if not path.is_absolute():
            path = self.output_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def require(path: str | Path | None, flag: str) -> Path:
        """An input path that must be given and must exist."""
        if path is None:
            raise UsageError(f"{flag} is required")
        path = Path(path)
        if not path.exists():
            raise IoFailureError(f"Input file not found: {path}")
        return path

    def read_returns(self, path: str | Path | None) -> ReturnsPanel:
        return load_returns(self.require(path, "--input"))

    def read_factors(self, path: str | Path | None) -> FactorPanel:
        return load_factors(self.require(path, "--factors"))

    def read_sectors(self, path: str | Path | None) -> SectorMap:
        return load_sector_map(self.require(path, "--sectors"))

    def read_distances(self, path: str | Path | None) -> DistanceMatrix:
        return load_distances(self.require(path, "--distances"))

    def write_json(self, name: str | Path, payload: dict[str, Any]) -> Path:
        """Payload plus the echoed config; the timestamp lives under ``metadata`` only."""
        path = self.path(name)
        document = {**payload, "config": self.config.echo(), "metadata": metadata()}
        try:
            with open(path, "w") as f:
                json.dump(document, f, indent=2, sort_keys=True)
                f.write("\n")
        except OSError as e:
            raise IoFailureError(f"Cannot write {path}: {e}") from e
        logger.info("Wrote %s", path)
        return path

    def write_text(self, name: str | Path, text: str) -> Path:
        path = self.path(name)
        try:
            path.write_text(text)
        except OSError as e:
            raise IoFailureError(f"Cannot write {path}: {e}") from e
        logger.info("Wrote %s", path)
        return path

    def write_csv(self, name: str | Path, frame: pd.DataFrame, index: bool = False) -> Path:
        path = self.path(name)
        try:
            frame.to_csv(path, index=index, lineterminator="\n", float_format="%.12g")
        except OSError as e:
            raise IoFailureError(f"Cannot write {path}: {e}") from e
        logger.info("Wrote %s", path)
        return path

    def save_model(self, name: str | Path, kind: str, model: FittedModel, **extra: Any) -> Path:
        if kind not in MODEL_KINDS:
            raise UsageError(f"Unknown model kind '{kind}'")
        return self.write_json(name, {"kind": kind, "model": model.to_dict(), **extra})

    @staticmethod
    def load_model(path: str | Path | None) -> tuple[str, FittedModel, dict[str, Any]]:
        """(kind, model, full document) of a model file written by :meth:`save_model`."""
        path = Workspace.require(path, "--model")
        try:
            with open(path) as f:
                document = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise IoFailureError(f"Cannot read model file {path}: {e}") from e
        kind = document.get("kind")
        data = document.get("model")
        if kind not in MODEL_KINDS or not isinstance(data, dict):
            raise IoFailureError(f"{path} is not a grmkit model file")
        try:
            if kind == "grm":
                model: FittedModel = GrmModel.from_dict(data)
            elif kind in ("pca", "exogenous"):
                model = FactorModel.from_dict(data)
            else:
                model = MixedModel.from_dict(data)
        except GrmError:
            raise
        except KeyError as e:
            raise IoFailureError(f"{path} is missing field {e}") from e
        except (TypeError, ValueError) as e:
            raise IoFailureError(f"{path} holds an invalid model: {e}") from e
        return kind, model, document
