"""Exogenous and PCA factor baselines, plus factors implied by a precision matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
from scipy import linalg

from grmkit.engine.covariance import Divisor, sample_covariance
from grmkit.engine.panel import FactorPanel, PanelKind, ReturnsPanel, center
from grmkit.engine.precision import PrecisionEstimate
from grmkit.engine.spectral import fix_signs, leading_eigenpairs
from grmkit.errors import (
    DimensionMismatchError,
    GrmError,
    MisalignmentError,
    MissingFactorsError,
    SingularFactorGramError,
    SingularOmegaError,
    ZeroMeanEigenvectorError,
    ZeroMeanError,
    ZeroVectorError,
)

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12
PCA_GAP_TOL = 1e-12
IMPLIED_GAP_TOL = 1e-10
ZERO_MEAN_TOL = 1e-12


class FactorKind(str, Enum):
    EXOGENOUS = "exogenous"
    PCA = "pca"


class Normalization(str, Enum):
    """How a beta or factor column is scaled."""

    UNIT = "unit"
    MEAN_ONE = "mean_one"
    RAW = "raw"


@dataclass(frozen=True, eq=False)
class BetaVector:
    """One beta per asset."""

    asset_ids: list[str]
    values: np.ndarray
    normalization: Normalization = Normalization.RAW
    source: str = ""

    def normalized(self, normalization: Normalization | str) -> BetaVector:
        normalization = Normalization(normalization)
        values = normalize(self.values, normalization)
        return replace(self, values=values, normalization=normalization)

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "normalization": self.normalization.value,
            "betas": {sym: float(v) for sym, v in zip(self.asset_ids, self.values)},
        }


@dataclass(frozen=True, eq=False)
class FactorModel:
    """Exposures B of ``Y = B X + Z``."""

    kind: FactorKind
    asset_ids: list[str]
    factor_names: list[str]
    B: np.ndarray
    fitted_on: dict[str, Any] = field(default_factory=dict)
    eigenvalues: np.ndarray | None = None

    @property
    def k(self) -> int:
        return self.B.shape[1]

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "kind": self.kind.value,
            "asset_ids": list(self.asset_ids),
            "factor_names": list(self.factor_names),
            "k": self.k,
            "B": self.B.tolist(),
            "fitted_on": dict(self.fitted_on),
        }
        if self.eigenvalues is not None:
            data["eigenvalues"] = self.eigenvalues.tolist()
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FactorModel:
        eig = data.get("eigenvalues")
        B = np.asarray(data["B"], dtype=float)
        if B.ndim != 2 or B.shape != (len(data["asset_ids"]), len(data["factor_names"])):
            raise DimensionMismatchError("Exposure matrix does not match its labels")
        return cls(
            kind=FactorKind(data["kind"]),
            asset_ids=list(data["asset_ids"]),
            factor_names=list(data["factor_names"]),
            B=B,
            fitted_on=dict(data.get("fitted_on", {})),
            eigenvalues=np.asarray(eig, dtype=float) if eig is not None else None,
        )


@dataclass(frozen=True, eq=False)
class ImpliedFactorMatrix:
    """Leading eigenvectors of the covariance implied by a precision estimate."""

    asset_ids: list[str]
    B_imp: np.ndarray
    eigenvalues: np.ndarray
    normalization: Normalization

    def to_dict(self) -> dict[str, Any]:
        return {
            "asset_ids": list(self.asset_ids),
            "normalization": self.normalization.value,
            "eigenvalues": self.eigenvalues.tolist(),
            "B_imp": self.B_imp.tolist(),
        }


def normalize(
    values: np.ndarray,
    normalization: Normalization,
    zero_mean_error: type[GrmError] = ZeroMeanError,
) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if normalization is Normalization.RAW:
        return values.copy()
    if normalization is Normalization.UNIT:
        norm = np.linalg.norm(values)
        if norm == 0.0:
            raise ZeroVectorError("Cannot scale a zero vector to unit length")
        return values / norm
    mean = values.mean()
    if abs(mean) < ZERO_MEAN_TOL:
        raise zero_mean_error("Cannot scale a mean-zero vector to mean one")
    return values / mean


def _sample_info(panel: ReturnsPanel) -> dict[str, Any]:
    return {
        "n": panel.n,
        "first": panel.timestamps[0].isoformat(),
        "last": panel.timestamps[-1].isoformat(),
    }


def _check_aligned(panel: ReturnsPanel, factors: FactorPanel) -> None:
    if panel.timestamps != factors.timestamps:
        raise MisalignmentError("Return and factor panels have different timestamps")


def factor_gram_solve(X: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """(X X^T)^-1 rhs, refusing collinear factors."""
    G = X @ X.T
    if np.linalg.cond(G) > MAX_CONDITION:
        raise SingularFactorGramError("Factor returns are collinear")
    try:
        c = linalg.cho_factor(G)
    except linalg.LinAlgError as e:
        raise SingularFactorGramError("Factor Gram matrix is not positive definite") from e
    return linalg.cho_solve(c, rhs)


def fit_exogenous(panel: ReturnsPanel, factors: FactorPanel) -> FactorModel:
    """Least-squares exposures B = Y X^T (X X^T)^-1."""
    _check_aligned(panel, factors)
    Y = center(panel).values
    X = center(factors).values
    B = factor_gram_solve(X, X @ Y.T).T
    return FactorModel(
        kind=FactorKind.EXOGENOUS,
        asset_ids=list(panel.asset_ids),
        factor_names=list(factors.factor_names),
        B=B,
        fitted_on=_sample_info(panel),
    )


def fit_pca(panel: ReturnsPanel, k: int) -> FactorModel:
    """Top-k eigenvectors of the (n - 1)-normalized sample covariance."""
    if not 1 <= k <= panel.p:
        raise GrmError(f"k must lie in [1, {panel.p}], got {k}")
    S = sample_covariance(center(panel), Divisor.N_MINUS_1)
    pairs = leading_eigenpairs(S.S, k, gap_tol=PCA_GAP_TOL, cut_only=True)
    logger.debug("PCA top eigenvalues: %s", pairs.values)
    return FactorModel(
        kind=FactorKind.PCA,
        asset_ids=list(panel.asset_ids),
        factor_names=[f"PC{i + 1}" for i in range(k)],
        B=pairs.vectors,
        fitted_on=_sample_info(panel),
        eigenvalues=pairs.values,
    )


def predict_factor(
    model: FactorModel, out_panel: ReturnsPanel, out_factors: FactorPanel | None = None
) -> ReturnsPanel:
    """Exogenous: B X_O. PCA: B (B^T B)^-1 B^T Y_O."""
    if sorted(out_panel.asset_ids) != sorted(model.asset_ids):
        raise DimensionMismatchError("Panel and model cover different assets")
    if out_panel.asset_ids != model.asset_ids:
        out_panel = out_panel.reorder(model.asset_ids)

    if model.kind is FactorKind.EXOGENOUS:
        if out_factors is None:
            raise MissingFactorsError(
                "An exogenous factor model needs out-of-sample factor returns"
            )
        _check_aligned(out_panel, out_factors)
        if out_factors.k != model.k:
            raise DimensionMismatchError(
                f"Model has {model.k} factors, panel provides {out_factors.k}"
            )
        fitted = model.B @ out_factors.values
    else:
        B = model.B
        scores = np.linalg.solve(B.T @ B, B.T @ out_panel.values)
        fitted = B @ scores
    return replace(out_panel, values=fitted, kind=PanelKind.PREDICTED)


def implied_factors(
    omega: PrecisionEstimate,
    k: int = 1,
    normalization: Normalization | str = Normalization.UNIT,
) -> ImpliedFactorMatrix:
    """Top-k eigenvectors of omega^-1."""
    normalization = Normalization(normalization)
    Om = omega.omega
    if not np.all(np.isfinite(Om)) or np.linalg.cond(Om) > MAX_CONDITION:
        raise SingularOmegaError("Precision matrix is numerically singular")
    sigma = linalg.inv(Om)
    sigma = (sigma + sigma.T) / 2

    pairs = leading_eigenpairs(sigma, k, gap_tol=IMPLIED_GAP_TOL)
    if np.any(pairs.values <= 0.0):
        raise SingularOmegaError("Implied covariance has a non-positive leading eigenvalue")

    B = pairs.vectors
    if normalization is not Normalization.UNIT:
        B = np.column_stack(
            [normalize(B[:, c], normalization, ZeroMeanEigenvectorError) for c in range(k)]
        )
    return ImpliedFactorMatrix(
        asset_ids=list(omega.asset_ids),
        B_imp=B,
        eigenvalues=pairs.values,
        normalization=normalization,
    )


def implied_beta(
    omega: PrecisionEstimate, normalization: Normalization | str = Normalization.MEAN_ONE
) -> BetaVector:
    """First implied factor as a beta vector."""
    imp = implied_factors(omega, 1, normalization)
    return BetaVector(
        asset_ids=list(omega.asset_ids),
        values=imp.B_imp[:, 0],
        normalization=imp.normalization,
        source=f"implied_{omega.method.value}",
    )


def factor_beta(
    model: FactorModel, normalization: Normalization | str = Normalization.MEAN_ONE
) -> BetaVector:
    """First exposure column, the model's market beta."""
    normalization = Normalization(normalization)
    column = model.B[:, :1]
    if model.kind is FactorKind.PCA:
        column = fix_signs(column)
    return BetaVector(
        asset_ids=list(model.asset_ids),
        values=normalize(column[:, 0], normalization),
        normalization=normalization,
        source=model.kind.value,
    )
