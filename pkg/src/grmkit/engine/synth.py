"""Synthetic markets with known structure, and brute-force oracles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Any

import numpy as np
import pandas as pd
from scipy import linalg

from grmkit.engine.panel import FactorPanel, ReturnsPanel
from grmkit.errors import (
    DegenerateMarketError,
    DegenerateSampleError,
    GrmError,
    NotPositiveDefiniteError,
    SingularSubmatrixError,
)

logger = logging.getLogger(__name__)

START_DATE = date(2000, 1, 3)
MAX_BRUTE_FORCE_P = 8
MAX_CONDITION = 1e12


class Structure(str, Enum):
    CHAIN = "chain"
    BANDED = "banded"
    RANDOM_SPARSE = "random_sparse"
    ONE_FACTOR = "one_factor"
    K_FACTOR = "k_factor"


SPARSE_STRUCTURES = {Structure.CHAIN, Structure.BANDED, Structure.RANDOM_SPARSE}
INT_FIELDS: list[tuple[str, Any]] = [(key, int) for key in ("p", "n", "seed", "width", "k")]
REAL_FIELDS: list[tuple[str, Any]] = [
    (key, (int, float)) for key in ("off_diagonal", "density", "factor_var", "idio_var")
]


@dataclass
class SyntheticSpec:
    """Recipe for a synthetic market."""

    p: int
    n: int
    structure: Structure = Structure.CHAIN
    seed: int = 20080101
    off_diagonal: float = -0.5
    width: int = 1
    density: float = 0.05
    beta: list[float] | None = None
    factor_var: float = 1.0
    idio_var: float = 1.0
    k: int = 3
    B: list[list[float]] | None = None
    V: list[list[float]] | None = None
    delta: list[float] | None = None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "p": self.p,
            "n": self.n,
            "structure": self.structure.value,
            "seed": self.seed,
        }
        if self.structure in SPARSE_STRUCTURES:
            data["off_diagonal"] = self.off_diagonal
        if self.structure is Structure.BANDED:
            data["width"] = self.width
        if self.structure is Structure.RANDOM_SPARSE:
            data["density"] = self.density
        if self.structure is Structure.ONE_FACTOR:
            data.update(beta=self.beta, factor_var=self.factor_var, idio_var=self.idio_var)
        if self.structure is Structure.K_FACTOR:
            data.update(k=self.k, B=self.B, V=self.V, delta=self.delta)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SyntheticSpec:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise GrmError(f"Unknown synthetic spec fields: {sorted(unknown)}")
        missing = {"p", "n"} - set(data)
        if missing:
            raise GrmError(f"Synthetic spec is missing fields: {sorted(missing)}")
        kwargs = dict(data)
        for key, kinds in INT_FIELDS + REAL_FIELDS:
            value = kwargs.get(key, 0)
            if isinstance(value, bool) or not isinstance(value, kinds):
                raise GrmError(f"Synthetic spec field '{key}' must be a number, got {value!r}")
        try:
            kwargs["structure"] = Structure(kwargs.get("structure", "chain"))
        except ValueError as e:
            choices = [s.value for s in Structure]
            raise GrmError(
                f"Unknown structure {kwargs['structure']!r}, expected one of {choices}"
            ) from e
        return cls(**kwargs)


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    """Population parameters behind a synthetic panel."""

    sigma: np.ndarray
    omega: np.ndarray | None = None
    B: np.ndarray | None = None
    V: np.ndarray | None = None
    delta: np.ndarray | None = None
    factors: FactorPanel | None = None
    edges: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class CapmCheck:
    """Beta of the market portfolio and the cross-correlation left in residuals."""

    w_beta: float
    max_offdiag: float
    residual_cov: np.ndarray
    orthogonality: float


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def _labels(p: int) -> list[str]:
    width = max(3, len(str(p)))
    return [f"S{i + 1:0{width}d}" for i in range(p)]


def _timestamps(n: int) -> list[date]:
    return [ts.date() for ts in pd.bdate_range(START_DATE, periods=n)]


def sparse_precision(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    """Diagonally dominant precision matrix with the requested support."""
    p = spec.p
    omega = np.zeros((p, p))
    if spec.structure is Structure.CHAIN:
        pairs = [(i, i + 1) for i in range(p - 1)]
        vals = [spec.off_diagonal] * len(pairs)
    elif spec.structure is Structure.BANDED:
        if spec.width < 1:
            raise GrmError("Band width must be at least 1")
        pairs = [(i, j) for i in range(p) for j in range(i + 1, min(p, i + spec.width + 1))]
        vals = [spec.off_diagonal] * len(pairs)
    else:
        if not 0.0 <= spec.density <= 1.0:
            raise GrmError("Density must lie in [0, 1]")
        upper = [(i, j) for i in range(p) for j in range(i + 1, p)]
        keep = rng.random(len(upper)) < spec.density
        pairs = [pair for pair, k in zip(upper, keep) if k]
        vals = list(spec.off_diagonal * rng.uniform(0.5, 1.0, len(pairs)))

    for (i, j), v in zip(pairs, vals):
        omega[i, j] = omega[j, i] = v
    diag = 1.0 + np.abs(omega).sum(axis=1).max()
    np.fill_diagonal(omega, diag)
    return omega


def _sample_gaussian(
    precision: np.ndarray | None, covariance: np.ndarray | None, n: int, rng: np.random.Generator
) -> np.ndarray:
    p = len(precision if precision is not None else covariance)
    Z = rng.standard_normal((p, n))
    try:
        if precision is not None:
            L = linalg.cholesky(precision, lower=True)
            return linalg.solve_triangular(L.T, Z, lower=False)
        L = linalg.cholesky(covariance, lower=True)
        return L @ Z
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("Synthetic market matrix is not positive definite") from e


def generate(spec: SyntheticSpec) -> tuple[ReturnsPanel, SyntheticTruth]:
    """Sample ``spec.n`` Gaussian observations of a ``spec.p``-asset market."""
    if spec.p < 2 or spec.n < 2:
        raise DegenerateSampleError(f"Need p >= 2 and n >= 2, got p={spec.p}, n={spec.n}")
    rng = make_rng(spec.seed)
    ids = _labels(spec.p)
    stamps = _timestamps(spec.n)

    if spec.structure in SPARSE_STRUCTURES:
        omega = sparse_precision(spec, rng)
        Y = _sample_gaussian(omega, None, spec.n, rng)
        edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(omega, k=1)))]
        truth = SyntheticTruth(sigma=linalg.inv(omega), omega=omega, edges=edges)
    elif spec.structure is Structure.ONE_FACTOR:
        Y, truth = _one_factor(spec, rng, stamps)
    else:
        Y, truth = _k_factor(spec, rng, stamps)

    logger.debug(
        "Generated %s market: p=%d, n=%d, seed=%d",
        spec.structure.value, spec.p, spec.n, spec.seed,
    )
    panel = ReturnsPanel(asset_ids=ids, timestamps=stamps, values=Y)
    return panel, truth


def _one_factor(
    spec: SyntheticSpec, rng: np.random.Generator, stamps: list[date]
) -> tuple[np.ndarray, SyntheticTruth]:
    if spec.beta is not None:
        beta = np.asarray(spec.beta, dtype=float)
        if beta.shape != (spec.p,):
            raise GrmError(f"beta has {beta.size} entries for {spec.p} assets")
    else:
        beta = rng.uniform(0.5, 1.5, spec.p)
        beta /= beta.mean()
    if spec.idio_var <= 0.0 or spec.factor_var < 0.0:
        raise NotPositiveDefiniteError("one_factor needs idio_var > 0 and factor_var >= 0")

    x = np.sqrt(spec.factor_var) * rng.standard_normal(spec.n)
    Z = np.sqrt(spec.idio_var) * rng.standard_normal((spec.p, spec.n))
    Y = np.outer(beta, x) + Z
    sigma = spec.factor_var * np.outer(beta, beta) + spec.idio_var * np.eye(spec.p)
    factors = FactorPanel(factor_names=["MKT"], timestamps=stamps, values=x[None, :])
    return Y, SyntheticTruth(
        sigma=sigma,
        B=beta[:, None],
        V=np.array([[spec.factor_var]]),
        delta=np.full(spec.p, spec.idio_var),
        factors=factors,
    )


def _k_factor(
    spec: SyntheticSpec, rng: np.random.Generator, stamps: list[date]
) -> tuple[np.ndarray, SyntheticTruth]:
    if spec.B is not None:
        B = np.asarray(spec.B, dtype=float)
    else:
        B = rng.normal(0.0, 0.5, (spec.p, spec.k))
        B[:, 0] = rng.uniform(0.5, 1.5, spec.p)
    k = B.shape[1]
    V = np.asarray(spec.V, dtype=float) if spec.V is not None else np.diag(0.5 ** np.arange(k))
    delta = np.asarray(spec.delta, dtype=float) if spec.delta is not None else np.ones(spec.p)
    if B.shape[0] != spec.p or V.shape != (k, k) or delta.shape != (spec.p,):
        raise GrmError("k_factor B, V and delta have inconsistent shapes")
    if np.any(delta <= 0.0):
        raise NotPositiveDefiniteError("Idiosyncratic variances must be positive")

    X = _sample_gaussian(None, V, spec.n, rng)
    Z = np.sqrt(delta)[:, None] * rng.standard_normal((spec.p, spec.n))
    Y = B @ X + Z
    sigma = B @ V @ B.T + np.diag(delta)
    factors = FactorPanel(
        factor_names=[f"F{i + 1}" for i in range(k)], timestamps=stamps, values=X
    )
    return Y, SyntheticTruth(sigma=sigma, B=B, V=V, delta=delta, factors=factors)


def brute_force_A(sigma: np.ndarray) -> np.ndarray:
    """Row-by-row least squares of each asset on all the others."""
    S = np.asarray(sigma, dtype=float)
    p = len(S)
    if p > MAX_BRUTE_FORCE_P:
        raise GrmError(f"Brute-force oracle is limited to p <= {MAX_BRUTE_FORCE_P}")
    A = np.zeros((p, p))
    for i in range(p):
        rest = [j for j in range(p) if j != i]
        if not rest:
            continue
        block = S[np.ix_(rest, rest)]
        if np.linalg.cond(block) > MAX_CONDITION:
            raise SingularSubmatrixError(f"Covariance without asset {i} is singular")
        A[i, rest] = np.linalg.solve(block, S[rest, i])
    return A


def capm_residual_check(
    w_m: np.ndarray, sigma: np.ndarray, beta: np.ndarray | None = None
) -> CapmCheck:
    """Market-model residual covariance for weights ``w_m``.

    ``beta`` defaults to ``Sigma w / (w' Sigma w)``. The market portfolio then
    has beta one and ``Var(Z) = (I - beta w')Sigma(I - beta w')^T`` is
    orthogonal to ``w`` yet not diagonal.
    """
    w = np.asarray(w_m, dtype=float)
    S = np.asarray(sigma, dtype=float)
    p = len(w)
    if p < 2:
        raise DegenerateMarketError("A one-asset market has no cross terms")
    var_m = float(w @ S @ w)
    if var_m <= 0.0:
        raise DegenerateMarketError("Market portfolio has zero variance")
    b = S @ w / var_m if beta is None else np.asarray(beta, dtype=float)

    P = np.eye(p) - np.outer(b, w)
    resid = P @ S @ P.T
    off = resid - np.diag(np.diag(resid))
    return CapmCheck(
        w_beta=float(w @ b),
        max_offdiag=float(np.abs(off).max()),
        residual_cov=resid,
        orthogonality=float(np.abs(w @ resid).max()),
    )
