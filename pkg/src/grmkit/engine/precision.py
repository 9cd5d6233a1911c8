"""Sparse precision estimates, regularization paths and cross-validation."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from grmkit.engine.concord import concord_kkt, solve_concord
from grmkit.engine.coordinate import SolverResult
from grmkit.engine.covariance import CovarianceEstimate, Divisor, sample_covariance
from grmkit.engine.glasso import glasso_kkt, invert_spd, solve_glasso
from grmkit.engine.panel import ReturnsPanel
from grmkit.errors import (
    DegenerateSampleError,
    GrmError,
    InsufficientDataError,
    NonPositiveDiagonalError,
    NotConvergedError,
    PathError,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 500
SYMMETRY_TOL = 1e-10


class Method(str, Enum):
    """How a precision matrix was obtained."""

    GLASSO = "glasso"
    CONCORD = "concord"
    PCA_PLUGIN = "pca_plugin"
    EXACT_INVERSE = "exact_inverse"


@dataclass(frozen=True, eq=False)
class PrecisionEstimate:
    """An estimated precision matrix with solver metadata."""

    asset_ids: list[str]
    omega: np.ndarray
    method: Method
    lam: float = 0.0
    frobenius_weight: float = 0.0
    iterations: int = 0
    converged: bool = True
    objective_trace: list[float] = field(default_factory=list)
    kkt: float | None = None

    @property
    def p(self) -> int:
        return len(self.asset_ids)

    def support(self) -> np.ndarray:
        """Boolean off-diagonal sparsity pattern."""
        nz = self.omega != 0.0
        np.fill_diagonal(nz, False)
        return nz

    def edge_count(self) -> int:
        return int(np.triu(self.support(), k=1).sum())

    def zero_count(self) -> int:
        """Number of zero cells in the whole matrix."""
        return int((self.omega == 0.0).sum())

    def covariance(self) -> np.ndarray:
        return invert_spd(self.omega)

    def validate(self) -> None:
        if self.omega.shape != (self.p, self.p):
            raise GrmError(f"Precision matrix is {self.omega.shape} for {self.p} assets")
        if not np.allclose(self.omega, self.omega.T, rtol=0.0, atol=SYMMETRY_TOL):
            raise GrmError("Precision matrix is not symmetric")
        if np.any(np.diag(self.omega) <= 0.0):
            bad = int(np.argmax(np.diag(self.omega) <= 0.0))
            raise NonPositiveDiagonalError(
                f"Non-positive diagonal for asset '{self.asset_ids[bad]}'"
            )

    def to_dict(self) -> dict[str, Any]:
        rows, cols = np.nonzero(np.triu(self.omega))
        return {
            "asset_ids": list(self.asset_ids),
            "method": self.method.value,
            "lambda": self.lam,
            "frobenius_weight": self.frobenius_weight,
            "iterations": self.iterations,
            "converged": self.converged,
            "kkt": self.kkt,
            "objective_trace": list(self.objective_trace),
            "omega": self.omega.tolist(),
            "triplets": [
                [int(i), int(j), float(self.omega[i, j])] for i, j in zip(rows, cols)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PrecisionEstimate:
        est = cls(
            asset_ids=list(data["asset_ids"]),
            omega=np.asarray(data["omega"], dtype=float),
            method=Method(data["method"]),
            lam=float(data.get("lambda", 0.0)),
            frobenius_weight=float(data.get("frobenius_weight", 0.0)),
            iterations=int(data.get("iterations", 0)),
            converged=bool(data.get("converged", True)),
            objective_trace=[float(v) for v in data.get("objective_trace", [])],
            kkt=data.get("kkt"),
        )
        est.validate()
        return est


def _wrap(
    S: CovarianceEstimate,
    result: SolverResult,
    method: Method,
    lam: float,
    frobenius_weight: float = 0.0,
) -> PrecisionEstimate:
    omega = (result.omega + result.omega.T) / 2
    est = PrecisionEstimate(
        asset_ids=list(S.asset_ids),
        omega=omega,
        method=method,
        lam=lam,
        frobenius_weight=frobenius_weight,
        iterations=result.iterations,
        converged=result.converged,
        objective_trace=list(result.objective_trace),
        kkt=result.kkt,
    )
    if not result.converged:
        raise NotConvergedError(
            f"{method.value} did not converge in {result.iterations} sweeps "
            f"at lambda={lam:g} (KKT residual {result.kkt:.3g})",
            estimate=est,
        )
    return est


def glasso(
    S: CovarianceEstimate,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start: PrecisionEstimate | None = None,
) -> PrecisionEstimate:
    """Graphical lasso estimate at penalty ``lam``."""
    if lam < 0:
        raise GrmError(f"lambda must be non-negative, got {lam}")
    init = warm_start.omega if warm_start is not None else None
    result = solve_glasso(S.S, lam, tol=tol, max_iter=max_iter, omega_init=init)
    logger.debug("glasso lambda=%g: %d sweeps, kkt %.3g", lam, result.iterations, result.kkt)
    return _wrap(S, result, Method.GLASSO, lam)


def concord(
    S: CovarianceEstimate,
    lam: float,
    frobenius_weight: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start: PrecisionEstimate | None = None,
) -> PrecisionEstimate:
    """CONCORD estimate at penalty ``lam``, optionally with a Frobenius ridge."""
    if lam < 0 or frobenius_weight < 0:
        raise GrmError("lambda and frobenius_weight must be non-negative")
    init = warm_start.omega if warm_start is not None else None
    result = solve_concord(
        S.S, lam, frobenius_weight=frobenius_weight, tol=tol, max_iter=max_iter, omega_init=init
    )
    logger.debug("concord lambda=%g: %d sweeps, kkt %.3g", lam, result.iterations, result.kkt)
    return _wrap(S, result, Method.CONCORD, lam, frobenius_weight)


def exact_inverse(S: CovarianceEstimate) -> PrecisionEstimate:
    """Unpenalized precision, S^-1."""
    omega = invert_spd(S.S)
    return PrecisionEstimate(
        asset_ids=list(S.asset_ids),
        omega=omega,
        method=Method.EXACT_INVERSE,
        kkt=glasso_kkt(S.S, omega, 0.0),
    )


def fit_precision(
    S: CovarianceEstimate,
    method: Method | str,
    lam: float,
    frobenius_weight: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start: PrecisionEstimate | None = None,
) -> PrecisionEstimate:
    method = Method(method)
    if method is Method.GLASSO:
        return glasso(S, lam, tol=tol, max_iter=max_iter, warm_start=warm_start)
    if method is Method.CONCORD:
        return concord(
            S, lam, frobenius_weight=frobenius_weight, tol=tol, max_iter=max_iter,
            warm_start=warm_start,
        )
    if method is Method.EXACT_INVERSE:
        return exact_inverse(S)
    raise GrmError(f"{method.value} is not a penalized solver")


def kkt_residual(estimate: PrecisionEstimate, S: CovarianceEstimate) -> float:
    """Max-norm subgradient violation of ``estimate`` for its own objective."""
    if estimate.method is Method.CONCORD:
        return concord_kkt(S.S, estimate.omega, estimate.lam, estimate.frobenius_weight)
    lam = estimate.lam if estimate.method is Method.GLASSO else 0.0
    return glasso_kkt(S.S, estimate.omega, lam)


def default_lambda_grid(S: CovarianceEstimate, num: int = 20, ratio: float = 0.01) -> list[float]:
    """``num`` log-spaced penalties from max |S_ij| (i != j) down to ``ratio`` times that."""
    off = np.abs(S.S - np.diag(np.diag(S.S)))
    lam_max = float(off.max()) if S.p > 1 else 0.0
    if lam_max <= 0.0:
        raise DegenerateSampleError("Covariance has no off-diagonal mass to penalize")
    return [float(v) for v in np.geomspace(lam_max, lam_max * ratio, num)]


def _check_grid(grid: list[float]) -> None:
    if not grid:
        raise GrmError("lambda grid is empty")
    if any(b > a for a, b in zip(grid, grid[1:])):
        raise GrmError("lambda grid must be sorted in descending order")
    if grid[-1] < 0:
        raise GrmError("lambda grid contains a negative value")


def lambda_path(
    S: CovarianceEstimate,
    method: Method | str,
    grid: list[float],
    frobenius_weight: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[PrecisionEstimate]:
    """Fit along a descending grid, warm-starting each fit from the previous one."""
    _check_grid(grid)
    path: list[PrecisionEstimate] = []
    previous: PrecisionEstimate | None = None
    for lam in grid:
        try:
            est = fit_precision(
                S, method, lam, frobenius_weight=frobenius_weight, tol=tol,
                max_iter=max_iter, warm_start=previous,
            )
        except GrmError as e:
            raise PathError(f"lambda={lam:g}: {e}", lam) from e
        path.append(est)
        previous = est
    return path


@dataclass
class CrossValidation:
    """Outcome of K-fold penalty selection."""

    best_lambda: float
    grid: list[float]
    cv_errors: list[float]
    fold_errors: list[list[float]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "best_lambda": self.best_lambda,
            "grid": list(self.grid),
            "cv_errors": list(self.cv_errors),
            "fold_errors": [list(f) for f in self.fold_errors],
        }


def regression_matrix(omega: np.ndarray) -> np.ndarray:
    """I - D Omega with D = diag(1 / omega_ii)."""
    A = -omega / np.diag(omega)[:, None]
    np.fill_diagonal(A, 0.0)
    return A


def _fold_errors(
    panel: ReturnsPanel,
    test_cols: np.ndarray,
    method: Method,
    grid: list[float],
    frobenius_weight: float,
    tol: float,
    max_iter: int,
) -> list[float]:
    mask = np.ones(panel.n, dtype=bool)
    mask[test_cols] = False
    train = panel.values[:, mask]
    means = train.mean(axis=1, keepdims=True)
    train_panel = ReturnsPanel(
        asset_ids=panel.asset_ids,
        timestamps=[t for t, keep in zip(panel.timestamps, mask) if keep],
        values=train - means,
        centered=True,
    )
    S = sample_covariance(train_panel, Divisor.N)
    test = panel.values[:, test_cols] - means

    errors = []
    for est in lambda_path(S, method, grid, frobenius_weight, tol, max_iter):
        resid = test - regression_matrix(est.omega) @ test
        errors.append(float(np.mean(resid**2)))
    return errors


def cross_validate(
    panel: ReturnsPanel,
    method: Method | str,
    grid: list[float],
    folds: int = 5,
    frobenius_weight: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int | None = None,
) -> CrossValidation:
    """Pick the penalty with the lowest held-out GRM prediction error.

    Folds are contiguous blocks of columns. Each held-out block is centered
    with the training means, and its error is the mean squared residual of
    ``A y`` pooled over every (asset, observation) cell. Equal mean errors
    resolve to the larger penalty.
    """
    method = Method(method)
    _check_grid(grid)
    if folds < 2:
        raise InsufficientDataError(f"Need at least 2 folds, got {folds}")
    if panel.n < 2 * folds:
        raise InsufficientDataError(
            f"{panel.n} observations cannot fill {folds} folds of at least 2"
        )

    blocks = np.array_split(np.arange(panel.n), folds)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(
                _fold_errors, panel, cols, method, grid, frobenius_weight, tol, max_iter
            )
            for cols in blocks
        ]
        fold_errors = [f.result() for f in futures]

    cv_errors = [float(v) for v in np.mean(np.array(fold_errors), axis=0)]
    best = int(np.argmin(cv_errors))  # first minimum is the largest penalty
    for lam, err in zip(grid, cv_errors):
        logger.debug("cv lambda=%g: error %.6g", lam, err)
    logger.info("Cross-validation picked lambda=%g (error %.6g)", grid[best], cv_errors[best])
    return CrossValidation(
        best_lambda=grid[best], grid=list(grid), cv_errors=cv_errors, fold_errors=fold_errors
    )
