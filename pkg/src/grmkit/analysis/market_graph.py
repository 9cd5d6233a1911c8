"""Partial-correlation graphs of a market and group-level edge statistics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import networkx as nx
import numpy as np
import pandas as pd
from scipy import linalg

from grmkit.engine.covariance import CovarianceEstimate
from grmkit.engine.panel import SectorMap
from grmkit.engine.precision import Method, PrecisionEstimate
from grmkit.engine.spectral import leading_eigenpairs
from grmkit.errors import (
    GrmError,
    NonPositiveDiagonalError,
    SingularOmegaError,
    UncoveredVertexError,
    UnreachableTargetError,
)

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200


class GraphSource(str, Enum):
    GLASSO = "glasso"
    CONCORD = "concord"
    PCA_THRESHOLD = "pca_threshold"
    EXACT_INVERSE = "exact_inverse"


_SOURCE_BY_METHOD = {
    Method.GLASSO: GraphSource.GLASSO,
    Method.CONCORD: GraphSource.CONCORD,
    Method.PCA_PLUGIN: GraphSource.PCA_THRESHOLD,
    Method.EXACT_INVERSE: GraphSource.EXACT_INVERSE,
}


@dataclass
class PartialCorrelationGraph:
    """Undirected graph whose edges carry partial correlations."""

    asset_ids: list[str]
    edges: list[tuple[int, int, float]]
    source: GraphSource
    threshold: float | None = None

    @property
    def p(self) -> int:
        return len(self.asset_ids)

    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        """Unweighted 0/1 adjacency of the sparsity pattern."""
        adj = np.zeros((self.p, self.p))
        for i, j, _ in self.edges:
            adj[i, j] = adj[j, i] = 1.0
        return adj

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.p))
        g.add_weighted_edges_from(self.edges)
        return g

    def to_dict(self) -> dict[str, Any]:
        return {
            "asset_ids": list(self.asset_ids),
            "source": self.source.value,
            "threshold": self.threshold,
            "edges": [[i, j, w] for i, j, w in self.edges],
        }


@dataclass
class CommunityPartition:
    """Community label (1..k) for every asset."""

    asset_ids: list[str]
    labels: list[int]
    k: int
    merge_trace: list[tuple[int, int, int, float]] = field(default_factory=list)

    def members(self, label: int) -> list[str]:
        return [sym for sym, lab in zip(self.asset_ids, self.labels) if lab == label]

    def label_of(self, symbol: str) -> int | None:
        try:
            return self.labels[self.asset_ids.index(symbol)]
        except ValueError:
            return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "labels": dict(zip(self.asset_ids, self.labels)),
            "merge_trace": [list(m) for m in self.merge_trace],
        }


@dataclass
class SectorRatioMatrix:
    """Log-ratio of positive to negative edge counts between groups."""

    group_labels: list[str]
    phi: np.ndarray
    phi_scaled: np.ndarray
    counts_pos: np.ndarray
    counts_neg: np.ndarray

    def to_frame(self, scaled: bool = True) -> pd.DataFrame:
        values = self.phi_scaled if scaled else self.phi
        return pd.DataFrame(values, index=self.group_labels, columns=self.group_labels)

    def to_dict(self) -> dict[str, Any]:
        return {
            "group_labels": list(self.group_labels),
            "phi": self.phi.tolist(),
            "phi_scaled": self.phi_scaled.tolist(),
            "counts_pos": self.counts_pos.tolist(),
            "counts_neg": self.counts_neg.tolist(),
        }


def partial_correlation_matrix(omega: PrecisionEstimate | np.ndarray) -> np.ndarray:
    """-omega_ij / sqrt(omega_ii omega_jj) off the diagonal, zero on it."""
    Om = omega.omega if isinstance(omega, PrecisionEstimate) else np.asarray(omega, dtype=float)
    d = np.diag(Om)
    if np.any(d <= 0.0):
        raise NonPositiveDiagonalError("Partial correlations need a positive diagonal")
    scale = 1.0 / np.sqrt(d)
    P = -Om * np.outer(scale, scale)
    np.fill_diagonal(P, 0.0)
    return P


def _edges_from(P: np.ndarray, keep: np.ndarray) -> list[tuple[int, int, float]]:
    rows, cols = np.nonzero(np.triu(keep, k=1))
    return [(int(i), int(j), float(P[i, j])) for i, j in zip(rows, cols)]


def graph_from_precision(omega: PrecisionEstimate) -> PartialCorrelationGraph:
    """One edge per non-zero off-diagonal entry of omega."""
    P = partial_correlation_matrix(omega)
    return PartialCorrelationGraph(
        asset_ids=list(omega.asset_ids),
        edges=_edges_from(P, omega.omega != 0.0),
        source=_SOURCE_BY_METHOD[omega.method],
    )


def pca_plugin_precision(S: CovarianceEstimate, k: int) -> PrecisionEstimate:
    """(B L B^T + Delta)^-1 from the top-k principal components of S."""
    if not 1 <= k < S.p:
        raise GrmError(f"k must lie in [1, {S.p - 1}], got {k}")
    pairs = leading_eigenpairs(S.S, k)
    low_rank = (pairs.vectors * pairs.values) @ pairs.vectors.T
    delta = np.diag(S.S) - np.diag(low_rank)
    if np.any(delta <= 0.0):
        raise SingularOmegaError("Principal components leave no residual variance for some asset")
    sigma = low_rank + np.diag(delta)
    try:
        c = linalg.cho_factor(sigma)
    except linalg.LinAlgError as e:
        raise SingularOmegaError("Factor covariance is not positive definite") from e
    omega = linalg.cho_solve(c, np.eye(S.p))
    return PrecisionEstimate(
        asset_ids=list(S.asset_ids), omega=(omega + omega.T) / 2, method=Method.PCA_PLUGIN
    )


def threshold_pca_graph(
    S: CovarianceEstimate, k: int, target_edges: int
) -> PartialCorrelationGraph:
    """Hard-threshold the PCA plug-in partial correlations to about ``target_edges`` edges.

    An edge survives when ``|rho_ij| > gamma``; gamma is found by bisection as
    the smallest value whose edge count does not exceed the target.
    """
    max_pairs = S.p * (S.p - 1) // 2
    if target_edges < 0:
        raise GrmError("target_edges must be non-negative")
    if target_edges > max_pairs:
        raise UnreachableTargetError(
            f"{target_edges} edges requested but only {max_pairs} pairs exist"
        )

    P = partial_correlation_matrix(pca_plugin_precision(S, k))
    mags = np.abs(P[np.triu_indices(S.p, k=1)])

    def count(gamma: float) -> int:
        return int((mags > gamma).sum())

    if count(0.0) <= target_edges:
        gamma = 0.0
    else:
        lo, hi = 0.0, float(mags.max())
        for _ in range(BISECTION_MAX_ITER):
            if hi - lo <= BISECTION_TOL:
                break
            mid = (lo + hi) / 2
            if count(mid) <= target_edges:
                hi = mid
            else:
                lo = mid
        gamma = hi

    keep = np.abs(P) > gamma
    graph = PartialCorrelationGraph(
        asset_ids=list(S.asset_ids),
        edges=_edges_from(P, keep),
        source=GraphSource.PCA_THRESHOLD,
        threshold=gamma,
    )
    logger.info(
        "PCA threshold %.6g keeps %d of %d target edges", gamma, graph.edge_count(), target_edges
    )
    return graph


def _group_of(
    graph: PartialCorrelationGraph, grouping: SectorMap | CommunityPartition
) -> list[str]:
    groups = []
    for sym in graph.asset_ids:
        label = grouping.label_of(sym)
        if label is None:
            raise UncoveredVertexError(f"Asset '{sym}' has no group label")
        groups.append(str(label))
    return groups


def ratio_matrix(
    graph: PartialCorrelationGraph, grouping: SectorMap | CommunityPartition
) -> SectorRatioMatrix:
    """phi_ab = log((C+_ab + 1) / (C-_ab + 1)) over unordered group pairs."""
    groups = _group_of(graph, grouping)
    if isinstance(grouping, CommunityPartition):
        labels = sorted(set(groups), key=int)
    else:
        labels = sorted(set(groups))
    pos = {lab: i for i, lab in enumerate(labels)}

    m = len(labels)
    c_pos = np.zeros((m, m), dtype=int)
    c_neg = np.zeros((m, m), dtype=int)
    for i, j, w in graph.edges:
        a, b = sorted((pos[groups[i]], pos[groups[j]]))
        target = c_pos if w > 0 else c_neg
        target[a, b] += 1
        if a != b:
            target[b, a] += 1

    phi = np.log((c_pos + 1.0) / (c_neg + 1.0))
    top = phi.max() if phi.size else 0.0
    phi_scaled = phi / top if top > 0 else phi.copy()
    return SectorRatioMatrix(
        group_labels=labels, phi=phi, phi_scaled=phi_scaled, counts_pos=c_pos, counts_neg=c_neg
    )


def sector_community_counts(sectors: SectorMap, partition: CommunityPartition) -> pd.DataFrame:
    """Number of assets in each (sector, community) cell."""
    rows = []
    for sym, label in zip(partition.asset_ids, partition.labels):
        sector = sectors.label_of(sym)
        if sector is None:
            raise UncoveredVertexError(f"Asset '{sym}' has no sector")
        rows.append((sector, label))
    frame = pd.DataFrame(rows, columns=["sector", "community"])
    return pd.crosstab(frame["sector"], frame["community"])
