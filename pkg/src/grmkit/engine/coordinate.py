"""Pieces shared by the coordinate-descent precision solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolverResult:
    """Raw output of a precision solver before it is wrapped with metadata."""

    omega: np.ndarray
    iterations: int
    converged: bool
    kkt: float
    objective_trace: list[float] = field(default_factory=list)


def soft_threshold(z: float, lam: float) -> float:
    if z > lam:
        return z - lam
    if z < -lam:
        return z + lam
    return 0.0


def lasso_gram(
    V: np.ndarray,
    s: np.ndarray,
    lam: float,
    beta: np.ndarray,
    tol: float,
    max_sweeps: int = 1000,
) -> np.ndarray:
    """Minimize 1/2 b'Vb - s'b + lam * |b|_1 by cyclic coordinate descent.

    Sweeps run over the active set only; inactive coordinates are checked in
    one vectorized pass and any violators join the active set.
    """
    beta = beta.copy()
    diag = np.diag(V)
    grad = s - V @ beta  # negative gradient of the smooth part

    for _ in range(max_sweeps):
        active = np.flatnonzero((beta != 0.0) | (np.abs(grad) > lam))
        for _ in range(max_sweeps):
            max_step = 0.0
            for j in active:
                old = beta[j]
                new = soft_threshold(grad[j] + diag[j] * old, lam) / diag[j]
                if new != old:
                    delta = new - old
                    grad -= delta * V[:, j]
                    beta[j] = new
                    max_step = max(max_step, abs(delta) * diag[j])
            if max_step <= tol:
                break

        inactive = beta == 0.0
        if not np.any(np.abs(grad[inactive]) > lam + tol):
            break
    return beta
