"""Out-of-sample scoring: RMSE, BIC with free-parameter counts, and R^2."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from grmkit.engine.panel import ReturnsPanel
from grmkit.errors import (
    ConstantRowError,
    GrmError,
    IoFailureError,
    ShapeMismatchError,
    UnknownKindError,
    ZeroResidualError,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["model", "rmse", "rmse_pct", "bic", "r2_mean", "kappa", "p", "n_O"]


class ModelKind(str, Enum):
    EXOGENOUS = "exogenous"
    PCA = "pca"
    SPATIAL = "spatial"
    MIXED = "mixed"
    GRM = "grm"


@dataclass(frozen=True)
class ModelDescriptor:
    """What :func:`count_parameters` needs to know about a fitted model.

    ``zeros`` is the number of zero cells in the estimated precision matrix,
    both triangles and the diagonal; it only matters for ``grm`` and ``mixed``.
    """

    kind: ModelKind | str
    p: int
    k: int = 0
    zeros: int = 0


@dataclass
class EvalReport:
    model_label: str
    rmse: float
    rmse_pct: float
    bic: float
    r2_mean: float
    kappa: int
    p: int
    n_O: int
    centering: str = "own_means"

    def to_row(self) -> dict[str, Any]:
        return {
            "model": self.model_label,
            "rmse": self.rmse,
            "rmse_pct": self.rmse_pct,
            "bic": self.bic,
            "r2_mean": self.r2_mean,
            "kappa": self.kappa,
            "p": self.p,
            "n_O": self.n_O,
        }

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _matrices(predicted: ReturnsPanel, actual: ReturnsPanel) -> tuple[np.ndarray, np.ndarray]:
    if predicted.values.shape != actual.values.shape:
        raise ShapeMismatchError(
            f"Predicted panel is {predicted.values.shape}, actual is {actual.values.shape}"
        )
    if predicted.asset_ids != actual.asset_ids and sorted(predicted.asset_ids) == sorted(
        actual.asset_ids
    ):
        predicted = predicted.reorder(actual.asset_ids)
    return predicted.values, actual.values


def rmse(predicted: ReturnsPanel, actual: ReturnsPanel) -> tuple[float, float]:
    """Root mean squared error and its ratio to the RMS of ``actual`` in percent."""
    Y_hat, Y = _matrices(predicted, actual)
    err = float(np.sqrt(np.mean((Y_hat - Y) ** 2)))
    scale = float(np.sqrt(np.mean(Y**2)))
    if scale == 0.0:
        raise GrmError("Actual returns are identically zero; relative RMSE is undefined")
    return err, err / scale * 100.0


def count_parameters(descriptor: ModelDescriptor) -> int:
    """Free parameters of a fitted model.

    ========== ==================================
    exogenous  p k
    pca        p k
    spatial    1 + p k
    mixed      1 + p k + (p (p + 1) - g) / 2
    grm        (p (p + 1) - g) / 2
    ========== ==================================
    """
    try:
        kind = ModelKind(descriptor.kind)
    except ValueError as e:
        raise UnknownKindError(f"Unknown model kind: {descriptor.kind}") from e
    p, k = descriptor.p, descriptor.k
    graph_part = (p * (p + 1) - descriptor.zeros) // 2
    if kind in (ModelKind.EXOGENOUS, ModelKind.PCA):
        return p * k
    if kind is ModelKind.SPATIAL:
        return 1 + p * k
    if kind is ModelKind.MIXED:
        return 1 + p * k + graph_part
    return graph_part


def bic(predicted: ReturnsPanel, actual: ReturnsPanel, kappa: int) -> float:
    """n_O * sum_i log(RSS_i) + kappa * log(n_O), RSS_i being a per-asset mean."""
    Y_hat, Y = _matrices(predicted, actual)
    n_out = Y.shape[1]
    rss = np.mean((Y - Y_hat) ** 2, axis=1)
    if np.any(rss <= 0.0):
        i = int(np.argmax(rss <= 0.0))
        raise ZeroResidualError(f"Asset '{actual.asset_ids[i]}' is predicted exactly")
    return float(n_out * np.sum(np.log(rss)) + kappa * np.log(n_out))


def r2_mean(predicted: ReturnsPanel, actual: ReturnsPanel) -> float:
    """Cross-sectional average of per-asset R^2."""
    Y_hat, Y = _matrices(predicted, actual)
    dev = Y - Y.mean(axis=1, keepdims=True)
    tss = np.sum(dev**2, axis=1)
    if np.any(tss == 0.0):
        i = int(np.argmax(tss == 0.0))
        raise ConstantRowError(f"Returns of '{actual.asset_ids[i]}' are constant")
    r2 = 1.0 - np.sum((Y - Y_hat) ** 2, axis=1) / tss
    return float(r2.mean())


def evaluate(
    label: str, predicted: ReturnsPanel, actual: ReturnsPanel, kappa: int
) -> EvalReport:
    err, err_pct = rmse(predicted, actual)
    report = EvalReport(
        model_label=label,
        rmse=err,
        rmse_pct=err_pct,
        bic=bic(predicted, actual, kappa),
        r2_mean=r2_mean(predicted, actual),
        kappa=kappa,
        p=actual.p,
        n_O=actual.n,
    )
    logger.info("%s: rmse %.6g (%.2f%%), R2 %.4f", label, err, err_pct, report.r2_mean)
    return report


def write_reports(
    reports: list[EvalReport], csv_path: str | Path, json_path: str | Path | None = None
) -> list[Path]:
    """Fixed-column CSV sorted by model label, plus an optional JSON list."""
    ordered = sorted(reports, key=lambda r: r.model_label)
    written = []
    try:
        csv_path = Path(csv_path)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame([r.to_row() for r in ordered], columns=REPORT_COLUMNS)
        frame.to_csv(csv_path, index=False, lineterminator="\n", float_format="%.12g")
        written.append(csv_path)
        if json_path is not None:
            json_path = Path(json_path)
            json_path.parent.mkdir(parents=True, exist_ok=True)
            with open(json_path, "w") as f:
                json.dump([r.to_dict() for r in ordered], f, indent=2)
            written.append(json_path)
    except OSError as e:
        raise IoFailureError(f"Cannot write evaluation report: {e}") from e
    return written
