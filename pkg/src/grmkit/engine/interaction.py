"""Interaction models ``Y = rho W Y + B X + G``.

W is either a row-normalized inverse-distance matrix (the spatial model) or
the GRM coefficient matrix (the mixed model). Both go through the same
least-squares search for rho.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from grmkit.engine.factors import factor_gram_solve
from grmkit.engine.grm import GrmModel
from grmkit.engine.panel import DistanceMatrix, FactorPanel, PanelKind, ReturnsPanel, center
from grmkit.errors import (
    DimensionMismatchError,
    GrmError,
    MisalignmentError,
    NoFeasiblePointError,
    ZeroDistanceError,
)

logger = logging.getLogger(__name__)

DEFAULT_BOUNDS = (-2.0, 4.0)
DEFAULT_GRID_SIZE = 601
MAX_CONDITION = 1e12
FLAT_TOL = 1e-12


class WeightSource(str, Enum):
    SPATIAL = "spatial"
    GRM_A = "grm_A"


@dataclass(frozen=True, eq=False)
class InteractionWeights:
    """A zero-diagonal p x p interaction matrix."""

    asset_ids: list[str]
    W: np.ndarray
    source: WeightSource

    def to_dict(self) -> dict[str, Any]:
        return {
            "asset_ids": list(self.asset_ids),
            "source": self.source.value,
            "W": self.W.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> InteractionWeights:
        return cls(
            asset_ids=list(data["asset_ids"]),
            W=np.asarray(data["W"], dtype=float),
            source=WeightSource(data["source"]),
        )


@dataclass(frozen=True, eq=False)
class MixedModel:
    """Fitted interaction strength rho and factor exposures B."""

    rho: float
    B: np.ndarray
    weights: InteractionWeights
    factor_names: list[str]
    search_bounds: tuple[float, float]
    objective_value: float
    trace: list[tuple[float, float]] = field(default_factory=list)

    @property
    def asset_ids(self) -> list[str]:
        return self.weights.asset_ids

    @property
    def k(self) -> int:
        return self.B.shape[1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho": self.rho,
            "B": self.B.tolist(),
            "factor_names": list(self.factor_names),
            "weights": self.weights.to_dict(),
            "search_bounds": list(self.search_bounds),
            "objective_value": self.objective_value,
            # infeasible points are recorded with a null objective
            "trace": [[k, None if not np.isfinite(v) else v] for k, v in self.trace],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MixedModel:
        lo, hi = data["search_bounds"]
        return cls(
            rho=float(data["rho"]),
            B=np.asarray(data["B"], dtype=float),
            weights=InteractionWeights.from_dict(data["weights"]),
            factor_names=list(data["factor_names"]),
            search_bounds=(float(lo), float(hi)),
            objective_value=float(data["objective_value"]),
            trace=[
                (float(k), float("inf") if v is None else float(v))
                for k, v in data.get("trace", [])
            ],
        )


def spatial_weights(d: DistanceMatrix) -> InteractionWeights:
    """W_ij = 1 / (s_i d_ij) with s_i = sum_{j != i} 1 / d_ij, so rows sum to one."""
    D = np.asarray(d.d, dtype=float)
    off = ~np.eye(len(D), dtype=bool)
    if np.any(D[off] <= 0.0):
        i, j = np.argwhere(off & (D <= 0.0))[0]
        a, b = d.asset_ids[i], d.asset_ids[j]
        raise ZeroDistanceError(f"Distance between '{a}' and '{b}' is zero")
    inv = np.zeros_like(D)
    inv[off] = 1.0 / D[off]
    W = inv / inv.sum(axis=1, keepdims=True)
    return InteractionWeights(asset_ids=list(d.asset_ids), W=W, source=WeightSource.SPATIAL)


def grm_weights(grm: GrmModel) -> InteractionWeights:
    return InteractionWeights(
        asset_ids=list(grm.asset_ids), W=grm.A.copy(), source=WeightSource.GRM_A
    )


def _is_feasible(W: np.ndarray, kappa: float) -> bool:
    M = np.eye(len(W)) - kappa * W
    return bool(np.linalg.cond(M) < MAX_CONDITION)


def _check_inputs(
    panel: ReturnsPanel, factors: FactorPanel, weights: InteractionWeights
) -> ReturnsPanel:
    if panel.timestamps != factors.timestamps:
        raise MisalignmentError("Return and factor panels have different timestamps")
    if sorted(weights.asset_ids) != sorted(panel.asset_ids):
        raise DimensionMismatchError("Interaction weights and panel cover different assets")
    if panel.asset_ids != weights.asset_ids:
        panel = panel.reorder(weights.asset_ids)
    return panel


def fit_mixed(
    panel: ReturnsPanel,
    factors: FactorPanel,
    weights: InteractionWeights,
    bounds: tuple[float, float] = DEFAULT_BOUNDS,
    grid_size: int = DEFAULT_GRID_SIZE,
    threads: int | None = None,
) -> MixedModel:
    """Least-squares rho over a grid on ``bounds`` refined by golden-section search.

    The objective is ``||(I - k W) Y (I - X^T (X X^T)^-1 X)||_F^2``. Points
    where ``I - k W`` is numerically singular are skipped; a flat objective
    yields rho = 0 (or the feasible point nearest to it).
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise GrmError(f"Invalid search bounds ({lo}, {hi})")
    if grid_size < 1:
        raise GrmError("grid_size must be positive")
    panel = _check_inputs(panel, factors, weights)
    W = weights.W
    Y = center(panel).values
    X = center(factors).values

    ls = factor_gram_solve(X, X @ Y.T).T
    R = Y - ls @ X
    WR = W @ R
    a, b, c = float(np.sum(R * R)), float(np.sum(R * WR)), float(np.sum(WR * WR))

    def objective(kappa: float) -> float:
        return a - 2.0 * kappa * b + kappa * kappa * c

    grid = np.linspace(lo, hi, grid_size) if hi > lo else np.array([lo])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        feasible = np.array(list(pool.map(lambda k: _is_feasible(W, float(k)), grid)))
    if not feasible.any():
        raise NoFeasiblePointError(f"I - kW is singular at every grid point on [{lo}, {hi}]")

    values = np.array([objective(float(k)) if ok else np.inf for k, ok in zip(grid, feasible)])
    trace = [(float(k), float(v)) for k, v in zip(grid, values)]
    finite = values[feasible]

    if finite.max() - finite.min() <= FLAT_TOL * max(1.0, abs(finite.min())):
        candidates = np.flatnonzero(feasible)
        best = int(candidates[np.argmin(np.abs(grid[candidates]))])
        rho = 0.0 if lo <= 0.0 <= hi and _is_feasible(W, 0.0) else float(grid[best])
    else:
        best = int(np.argmin(values))  # lowest index wins ties
        rho = float(grid[best])
        rho = _refine(objective, grid, feasible, best, W, rho)

    obj = float(np.sum(((np.eye(len(W)) - rho * W) @ R) ** 2))
    B = factor_gram_solve(X, X @ ((np.eye(len(W)) - rho * W) @ Y).T).T
    logger.info("Interaction strength rho=%.6g (objective %.6g)", rho, obj)
    return MixedModel(
        rho=rho,
        B=B,
        weights=weights,
        factor_names=list(factors.factor_names),
        search_bounds=(lo, hi),
        objective_value=obj,
        trace=trace,
    )


def _refine(
    objective: Callable[[float], float],
    grid: np.ndarray,
    feasible: np.ndarray,
    best: int,
    W: np.ndarray,
    rho: float,
) -> float:
    """Golden-section search inside the bracket around the best grid point."""
    if best == 0 or best == len(grid) - 1:
        return rho
    if not (feasible[best - 1] and feasible[best + 1]):
        return rho
    left, right = float(grid[best - 1]), float(grid[best + 1])
    try:
        res = minimize_scalar(objective, bracket=(left, rho, right), method="golden", tol=1e-10)
    except ValueError:
        return rho
    x = float(res.x)
    if left <= x <= right and objective(x) <= objective(rho) and _is_feasible(W, x):
        return x
    return rho


def predict_mixed(
    model: MixedModel, out_panel: ReturnsPanel, out_factors: FactorPanel
) -> ReturnsPanel:
    """Y_hat = rho W Y_O + B X_O."""
    if out_panel.timestamps != out_factors.timestamps:
        raise MisalignmentError("Return and factor panels have different timestamps")
    if out_factors.k != model.k:
        raise MisalignmentError(f"Model has {model.k} factors, panel provides {out_factors.k}")
    if sorted(out_panel.asset_ids) != sorted(model.asset_ids):
        raise MisalignmentError("Panel and model cover different assets")
    if out_panel.asset_ids != model.asset_ids:
        out_panel = out_panel.reorder(model.asset_ids)
    fitted = model.rho * (model.weights.W @ out_panel.values) + model.B @ out_factors.values
    return replace(out_panel, values=fitted, kind=PanelKind.PREDICTED)
