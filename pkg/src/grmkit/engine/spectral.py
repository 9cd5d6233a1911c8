"""Leading eigenpairs of symmetric matrices with a deterministic sign."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from grmkit.errors import GrmError, TiedEigenvaluesError

# Above this size the Lanczos solver replaces the dense one
DENSE_LIMIT = 500
LANCZOS_TOL = 1e-10
LANCZOS_MAXITER = 10_000


class EigenPairs(NamedTuple):
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns, unit norm


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    vectors = vectors.copy()
    for c in range(vectors.shape[1]):
        idx = int(np.argmax(np.abs(vectors[:, c])))
        if vectors[idx, c] < 0:
            vectors[:, c] = -vectors[:, c]
    return vectors


def leading_eigenpairs(
    matrix: np.ndarray,
    k: int,
    method: str = "auto",
    gap_tol: float = 1e-12,
    cut_only: bool = False,
) -> EigenPairs:
    """Top-k eigenpairs of a symmetric matrix.

    One extra eigenvalue is computed when available so the gap at the cut
    can be checked. Any gap among the leading ``k + 1`` values that is not
    above ``gap_tol`` raises :class:`TiedEigenvaluesError`. With
    ``cut_only`` only the gap between values ``k`` and ``k + 1`` is checked.
    """
    M = np.asarray(matrix, dtype=float)
    p = M.shape[0]
    if M.shape != (p, p):
        raise GrmError(f"Expected a square matrix, got {M.shape}")
    if not 1 <= k <= p:
        raise GrmError(f"k must lie in [1, {p}], got {k}")
    M = (M + M.T) / 2
    m = min(k + 1, p)

    if method == "auto":
        method = "lanczos" if p > DENSE_LIMIT and m < p - 1 else "dense"

    if method == "dense":
        values, vectors = linalg.eigh(M, subset_by_index=[p - m, p - 1])
    elif method == "lanczos":
        v0 = np.full(p, 1.0 / np.sqrt(p))
        try:
            values, vectors = eigsh(
                M, k=m, which="LA", tol=LANCZOS_TOL, maxiter=LANCZOS_MAXITER, v0=v0
            )
        except ArpackNoConvergence as e:
            raise GrmError(f"Lanczos iteration did not converge for k={k}") from e
    else:
        raise GrmError(f"Unknown eigensolver: {method}")

    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]

    gaps = values[:-1] - values[1:]
    if cut_only:
        gaps = gaps[k - 1 :]
        offset = k - 1
    else:
        offset = 0
    if np.any(gaps <= gap_tol):
        at = offset + int(np.argmax(gaps <= gap_tol))
        raise TiedEigenvaluesError(
            f"Eigenvalues {at + 1} and {at + 2} are tied ({values[at]:.6g} vs {values[at + 1]:.6g})"
        )

    vectors = fix_signs(vectors[:, :k])
    return EigenPairs(values=values[:k], vectors=vectors)
