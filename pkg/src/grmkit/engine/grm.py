"""The graphical representation model and its variance identities.

Each asset is written as a regression on every other asset,
``Y = A Y + E`` with ``A = I - D Omega`` and ``D = diag(1 / omega_ii)``.
Residuals are uncorrelated with the asset they belong to only, so
``Cov(E, Y) = D`` is diagonal while ``Var(E) = D Omega D`` generally is not.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from scipy import linalg

from grmkit.engine.covariance import CovarianceEstimate
from grmkit.engine.panel import PanelKind, ReturnsPanel
from grmkit.engine.precision import Method, PrecisionEstimate, regression_matrix
from grmkit.errors import (
    DimensionMismatchError,
    EmptySubsetError,
    FullSubsetError,
    GrmError,
    NonPositiveDiagonalError,
    SingularBlockError,
)

RECONSTRUCTION_TOL = 1e-12
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class GrmModel:
    """Coefficient matrix A and residual variances D built from a precision estimate."""

    asset_ids: list[str]
    A: np.ndarray
    D: np.ndarray
    omega_source: PrecisionEstimate

    @property
    def p(self) -> int:
        return len(self.asset_ids)

    @property
    def omega(self) -> np.ndarray:
        return self.omega_source.omega

    def neighbours(self, asset: str) -> list[str]:
        """Assets with a non-zero coefficient in ``asset``'s regression."""
        i = self.asset_ids.index(asset)
        return [self.asset_ids[j] for j in np.flatnonzero(self.A[i])]

    def to_dict(self) -> dict[str, Any]:
        return {
            "asset_ids": list(self.asset_ids),
            "A": self.A.tolist(),
            "D": self.D.tolist(),
            "precision": self.omega_source.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GrmModel:
        model = build_grm(PrecisionEstimate.from_dict(data["precision"]))
        if "A" in data and not np.allclose(
            np.asarray(data["A"], dtype=float), model.A, rtol=0.0, atol=RECONSTRUCTION_TOL
        ):
            raise GrmError("Stored coefficient matrix disagrees with its precision matrix")
        if "D" in data and not np.allclose(
            np.asarray(data["D"], dtype=float), model.D, rtol=RECONSTRUCTION_TOL, atol=0.0
        ):
            raise GrmError("Stored residual variances disagree with their precision matrix")
        return model


@dataclass(frozen=True, eq=False)
class VarianceDecomposition:
    """Per-asset split of total variance into endogenous and residual parts."""

    asset_ids: list[str]
    total: np.ndarray
    endogenous: np.ndarray
    residual: np.ndarray

    def endogenous_share(self) -> np.ndarray:
        return self.endogenous / self.total

    def to_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "asset": sym,
                "total": float(t),
                "endogenous": float(e),
                "residual": float(r),
                "endogenous_share": float(e / t) if t > 0 else float("nan"),
            }
            for sym, t, e, r in zip(self.asset_ids, self.total, self.endogenous, self.residual)
        ]


@dataclass(frozen=True, eq=False)
class PartialCovariance:
    """Partial covariance of a pair given every other asset."""

    pair: tuple[int, int]
    pi: np.ndarray
    rho: float
    nu: float


def as_precision(
    omega: PrecisionEstimate | np.ndarray, asset_ids: list[str] | None = None
) -> PrecisionEstimate:
    """Accept a bare matrix wherever an estimate is expected."""
    if isinstance(omega, PrecisionEstimate):
        return omega
    omega = np.asarray(omega, dtype=float)
    ids = asset_ids or [f"A{i + 1}" for i in range(len(omega))]
    return PrecisionEstimate(asset_ids=ids, omega=omega, method=Method.EXACT_INVERSE)


def _as_sigma(sigma: CovarianceEstimate | np.ndarray, grm: GrmModel) -> np.ndarray:
    if isinstance(sigma, CovarianceEstimate):
        if list(sigma.asset_ids) != list(grm.asset_ids):
            raise DimensionMismatchError("Covariance and model cover different assets")
        return sigma.S
    S = np.asarray(sigma, dtype=float)
    if S.shape != (grm.p, grm.p):
        raise DimensionMismatchError(f"Covariance is {S.shape}, model has {grm.p} assets")
    return S


def build_grm(omega: PrecisionEstimate | np.ndarray) -> GrmModel:
    """A_ij = -omega_ij / omega_ii off the diagonal, D_i = 1 / omega_ii."""
    est = as_precision(omega)
    diag = np.diag(est.omega)
    if np.any(diag <= 0.0):
        bad = int(np.argmax(diag <= 0.0))
        raise NonPositiveDiagonalError(
            f"omega[{bad},{bad}] = {diag[bad]:g} for asset '{est.asset_ids[bad]}'"
        )
    return GrmModel(
        asset_ids=list(est.asset_ids),
        A=regression_matrix(est.omega),
        D=1.0 / diag,
        omega_source=est,
    )


def endogenous_covariance(grm: GrmModel, sigma: CovarianceEstimate | np.ndarray) -> np.ndarray:
    """Var(AY) = A Sigma A^T."""
    S = _as_sigma(sigma, grm)
    return grm.A @ S @ grm.A.T


def decompose_variance(
    grm: GrmModel, sigma: CovarianceEstimate | np.ndarray
) -> VarianceDecomposition:
    S = _as_sigma(sigma, grm)
    endogenous = np.einsum("ij,jk,ik->i", grm.A, S, grm.A)
    return VarianceDecomposition(
        asset_ids=list(grm.asset_ids),
        total=np.diag(S).copy(),
        endogenous=endogenous,
        residual=grm.D.copy(),
    )


def residual_covariance(grm: GrmModel) -> np.ndarray:
    """Var(E) = D Omega D."""
    return grm.D[:, None] * grm.omega * grm.D[None, :]


def uncorrelatedness_gap(grm: GrmModel, sigma: CovarianceEstimate | np.ndarray) -> float:
    """Largest off-diagonal |Cov(E, Y)|, zero when sigma is the inverse of omega."""
    S = _as_sigma(sigma, grm)
    cov = (np.eye(grm.p) - grm.A) @ S
    np.fill_diagonal(cov, 0.0)
    return float(np.abs(cov).max()) if grm.p > 1 else 0.0


def predict(grm: GrmModel, panel: ReturnsPanel) -> ReturnsPanel:
    """Y_hat = A Y, column by column."""
    if sorted(panel.asset_ids) != sorted(grm.asset_ids):
        raise DimensionMismatchError("Panel and model cover different assets")
    if panel.asset_ids != grm.asset_ids:
        panel = panel.reorder(grm.asset_ids)
    return replace(panel, values=grm.A @ panel.values, kind=PanelKind.PREDICTED)


def conditional_grm(omega: PrecisionEstimate | np.ndarray, subset: Sequence[int]) -> GrmModel:
    """GRM of the subset market once every other asset is conditioned on.

    Only the subset's block of omega is needed, and the result coincides
    with the corresponding block of the full model's A.
    """
    est = as_precision(omega)
    idx = list(dict.fromkeys(int(i) for i in subset))
    if not idx:
        raise EmptySubsetError("Conditioning subset is empty")
    if len(idx) >= est.p:
        raise FullSubsetError("Subset covers every asset; nothing left to condition on")
    if min(idx) < 0 or max(idx) >= est.p:
        raise DimensionMismatchError(f"Subset index out of range for {est.p} assets")

    block = PrecisionEstimate(
        asset_ids=[est.asset_ids[i] for i in idx],
        omega=est.omega[np.ix_(idx, idx)],
        method=est.method,
        lam=est.lam,
        frobenius_weight=est.frobenius_weight,
    )
    return build_grm(block)


def _cholesky_solve(block: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if np.linalg.cond(block) > MAX_CONDITION:
        raise SingularBlockError("Conditioning block is numerically singular")
    try:
        c = linalg.cho_factor(block)
    except linalg.LinAlgError as e:
        raise SingularBlockError("Conditioning block is not positive definite") from e
    return linalg.cho_solve(c, rhs)


def partial_pair(sigma: CovarianceEstimate | np.ndarray, i: int, j: int) -> PartialCovariance:
    """Schur-complement partial covariance of assets i and j."""
    S = sigma.S if isinstance(sigma, CovarianceEstimate) else np.asarray(sigma, dtype=float)
    p = len(S)
    if i == j:
        raise GrmError("A partial covariance needs two distinct assets")
    if not (0 <= i < p and 0 <= j < p):
        raise DimensionMismatchError(f"Pair ({i}, {j}) out of range for {p} assets")

    pair = [i, j]
    rest = [k for k in range(p) if k not in pair]
    pi = S[np.ix_(pair, pair)].copy()
    if rest:
        cross = S[np.ix_(pair, rest)]
        pi -= cross @ _cholesky_solve(S[np.ix_(rest, rest)], cross.T)
        pi = (pi + pi.T) / 2

    rho = float(np.clip(pi[0, 1] / np.sqrt(pi[0, 0] * pi[1, 1]), -1.0, 1.0))
    nu = float(S[i, i] - pi[0, 0] * (1.0 - rho**2))
    return PartialCovariance(pair=(i, j), pi=pi, rho=rho, nu=nu)
