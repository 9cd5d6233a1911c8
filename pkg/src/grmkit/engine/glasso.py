"""Graphical lasso by block coordinate descent.

Minimizes ``-log det(T) + tr(S T) + lam * sum_ij |T_ij|``. The penalty covers
the diagonal as well, so the working covariance keeps ``W_ii = S_ii + lam``.
Each sweep visits every column, solves the lasso subproblem for it against
the current working covariance and writes the result into both the
covariance and precision iterates.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import linalg

from grmkit.engine.coordinate import SolverResult, lasso_gram
from grmkit.errors import NonFiniteObjectiveError, SingularInputError

logger = logging.getLogger(__name__)

# Reciprocal condition number below this is treated as singular
SINGULAR_RCOND = 1e-12


def glasso_objective(S: np.ndarray, omega: np.ndarray, lam: float) -> float:
    sign, logdet = np.linalg.slogdet(omega)
    if sign <= 0:
        return float("inf")
    return float(-logdet + np.sum(S * omega) + lam * np.abs(omega).sum())


def glasso_kkt(S: np.ndarray, omega: np.ndarray, lam: float) -> float:
    """Largest violation of the stationarity conditions, with Sigma = inv(omega)."""
    try:
        c = linalg.cho_factor(omega)
    except linalg.LinAlgError:
        return float("inf")
    sigma = linalg.cho_solve(c, np.eye(len(omega)))
    grad = S - sigma
    nz = omega != 0.0
    resid = np.where(
        nz,
        np.abs(grad + lam * np.sign(omega)),
        np.maximum(np.abs(grad) - lam, 0.0),
    )
    return float(resid.max())


def invert_spd(S: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    try:
        c = linalg.cho_factor(S)
    except linalg.LinAlgError as e:
        raise SingularInputError("Covariance is not positive definite") from e
    if np.linalg.cond(S) > 1.0 / SINGULAR_RCOND:
        raise SingularInputError("Covariance is numerically singular")
    inv = linalg.cho_solve(c, np.eye(len(S)))
    return (inv + inv.T) / 2


def solve_glasso(
    S: np.ndarray,
    lam: float,
    tol: float = 1e-6,
    max_iter: int = 500,
    omega_init: np.ndarray | None = None,
) -> SolverResult:
    p = S.shape[0]
    if lam == 0.0:
        omega = invert_spd(S)
        return SolverResult(
            omega=omega,
            iterations=0,
            converged=True,
            kkt=glasso_kkt(S, omega, 0.0),
            objective_trace=[glasso_objective(S, omega, 0.0)],
        )

    diag = np.diag(S) + lam
    W = S.copy()
    omega = np.diag(1.0 / diag)
    if omega_init is not None:
        try:
            W = linalg.inv(omega_init)
            W = (W + W.T) / 2
            np.fill_diagonal(W, diag)
            linalg.cholesky(W)
            omega = omega_init.copy()
        except (linalg.LinAlgError, ValueError):
            logger.debug("Warm start rejected, starting cold")
            W = S.copy()
            omega = np.diag(1.0 / diag)
    np.fill_diagonal(W, diag)

    indices = np.arange(p)
    trace: list[float] = []
    kkt = float("inf")
    inner_tol = tol / 10

    for it in range(1, max_iter + 1):
        for idx in range(p):
            rest = indices != idx
            V = W[np.ix_(rest, rest)]
            row = S[idx, rest]
            coefs = -omega[rest, idx] / omega[idx, idx]
            coefs = lasso_gram(V, row, lam, coefs, inner_tol)

            w12 = V @ coefs
            W[idx, rest] = w12
            W[rest, idx] = w12
            theta = 1.0 / (W[idx, idx] - w12 @ coefs)
            omega[idx, idx] = theta
            omega[rest, idx] = -theta * coefs
            omega[idx, rest] = -theta * coefs

        if not np.all(np.isfinite(omega)):
            raise NonFiniteObjectiveError("Graphical lasso iterate is not finite")
        trace.append(glasso_objective(S, omega, lam))
        kkt = glasso_kkt(S, omega, lam)
        logger.debug("glasso sweep %d: objective %.6g, kkt %.3g", it, trace[-1], kkt)
        if kkt <= tol:
            return SolverResult(
                omega=omega, iterations=it, converged=True, kkt=kkt, objective_trace=trace
            )

    logger.warning("glasso stopped after %d sweeps with KKT residual %.3g", max_iter, kkt)
    return SolverResult(
        omega=omega, iterations=max_iter, converged=False, kkt=kkt, objective_trace=trace
    )
