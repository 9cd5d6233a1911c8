"""Sample covariance feeding every estimator."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from grmkit.engine.panel import ReturnsPanel
from grmkit.errors import DegenerateSampleError, DimensionMismatchError

SYMMETRY_TOL = 1e-12


class Divisor(str, Enum):
    """Normalization of the cross-product sum."""

    N = "n"
    N_MINUS_1 = "n_minus_1"
    POPULATION = "population"  # a known Sigma, not estimated from data


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """A p x p covariance matrix with its provenance."""

    asset_ids: list[str]
    S: np.ndarray
    divisor: Divisor = Divisor.N
    sample_size: int = 0

    @property
    def p(self) -> int:
        return len(self.asset_ids)

    @classmethod
    def from_matrix(cls, asset_ids: list[str] | None, S: np.ndarray) -> CovarianceEstimate:
        """Wrap a known covariance matrix."""
        S = np.asarray(S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionMismatchError(f"Covariance must be square, got shape {S.shape}")
        if not np.allclose(S, S.T, rtol=0.0, atol=SYMMETRY_TOL * max(1.0, np.abs(S).max())):
            raise DimensionMismatchError("Covariance must be symmetric")
        ids = list(asset_ids) if asset_ids is not None else [f"A{i + 1}" for i in range(len(S))]
        if len(ids) != len(S):
            raise DimensionMismatchError(f"{len(ids)} asset ids for a {len(S)}x{len(S)} matrix")
        return cls(asset_ids=ids, S=(S + S.T) / 2, divisor=Divisor.POPULATION)

    def correlation(self) -> np.ndarray:
        sd = np.sqrt(np.diag(self.S))
        return self.S / np.outer(sd, sd)

    def to_dict(self) -> dict[str, Any]:
        return {
            "asset_ids": list(self.asset_ids),
            "S": self.S.tolist(),
            "divisor": self.divisor.value,
            "sample_size": self.sample_size,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CovarianceEstimate:
        return cls(
            asset_ids=list(data["asset_ids"]),
            S=np.asarray(data["S"], dtype=float),
            divisor=Divisor(data.get("divisor", "n")),
            sample_size=int(data.get("sample_size", 0)),
        )


def sample_covariance(
    panel: ReturnsPanel, divisor: Divisor | str = Divisor.N
) -> CovarianceEstimate:
    """S = (1/divisor) sum_t (y_t - ybar)(y_t - ybar)^T over the panel's columns."""
    divisor = Divisor(divisor)
    if panel.n < 2:
        raise DegenerateSampleError(f"Need at least 2 observations, got {panel.n}")
    if divisor is Divisor.POPULATION:
        raise DegenerateSampleError("A sample covariance needs divisor n or n_minus_1")

    ddof = 1 if divisor is Divisor.N_MINUS_1 else 0
    S = np.atleast_2d(np.cov(panel.values, ddof=ddof))
    S = (S + S.T) / 2
    return CovarianceEstimate(
        asset_ids=list(panel.asset_ids), S=S, divisor=divisor, sample_size=panel.n
    )
