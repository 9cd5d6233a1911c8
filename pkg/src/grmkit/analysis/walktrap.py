"""Agglomerative community detection by short random walks.

Vertices start as singleton communities; at each step the adjacent pair
whose merge least increases the mean squared random-walk distance to the
community centres is merged. Distances use walks of ``walk_length`` steps on
the unweighted sparsity pattern with a self-loop on every vertex.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from grmkit.analysis.market_graph import CommunityPartition, PartialCorrelationGraph
from grmkit.errors import EmptyGraphError, GrmError

logger = logging.getLogger(__name__)

DEFAULT_WALK_LENGTH = 4
DEFAULT_COMMUNITIES = 11


@dataclass
class _Community:
    id: int
    size: int
    vector: np.ndarray  # D^-1/2 P^t_C
    vertices: list[int]
    neighbours: dict[int, float] = field(default_factory=dict)


def _delta_sigma(c1: _Community, c2: _Community, n: int) -> float:
    diff = c1.vector - c2.vector
    return float(c1.size * c2.size / (c1.size + c2.size) * (diff @ diff) / n)


def walktrap(
    graph: PartialCorrelationGraph,
    walk_length: int = DEFAULT_WALK_LENGTH,
    k: int = DEFAULT_COMMUNITIES,
) -> CommunityPartition:
    """Merge communities until ``k`` remain or no adjacent pair is left.

    Isolated vertices and disconnected components are never merged, so the
    returned partition may hold more than ``k`` communities.
    """
    n = graph.p
    if n == 0:
        raise EmptyGraphError("Cannot detect communities in a graph without vertices")
    if k < 1:
        raise GrmError(f"Community count must be at least 1, got {k}")
    if walk_length < 1:
        raise GrmError(f"Walk length must be at least 1, got {walk_length}")

    adj = nx.to_numpy_array(graph.to_networkx(), nodelist=range(n), weight=None)
    adj = (adj != 0).astype(float)
    np.fill_diagonal(adj, 1.0)
    degree = adj.sum(axis=1)
    P = adj / degree[:, None]
    Pt = np.linalg.matrix_power(P, walk_length)
    scaled = Pt / np.sqrt(degree)[None, :]

    communities = {v: _Community(id=v, size=1, vector=scaled[v], vertices=[v]) for v in range(n)}
    heap: list[tuple[float, int, int]] = []
    for i, j, _ in sorted(graph.edges):
        ds = _delta_sigma(communities[i], communities[j], n)
        communities[i].neighbours[j] = ds
        communities[j].neighbours[i] = ds
        heapq.heappush(heap, (ds, i, j))

    active = set(range(n))
    merges: list[tuple[int, int, int, float]] = []
    next_id = n
    while len(active) > k and heap:
        ds12, a, b = heapq.heappop(heap)
        if a not in active or b not in active:
            continue
        c1, c2 = communities[a], communities[b]
        size = c1.size + c2.size
        merged = _Community(
            id=next_id,
            size=size,
            vector=(c1.size * c1.vector + c2.size * c2.vector) / size,
            vertices=sorted(c1.vertices + c2.vertices),
        )
        for cid in sorted((set(c1.neighbours) | set(c2.neighbours)) - {a, b}):
            c = communities[cid]
            if cid in c1.neighbours and cid in c2.neighbours:
                ds = (
                    (c1.size + c.size) * c1.neighbours[cid]
                    + (c2.size + c.size) * c2.neighbours[cid]
                    - c.size * ds12
                ) / (size + c.size)
            else:
                ds = _delta_sigma(merged, c, n)
            merged.neighbours[cid] = ds
            c.neighbours.pop(a, None)
            c.neighbours.pop(b, None)
            c.neighbours[next_id] = ds
            heapq.heappush(heap, (ds, cid, next_id))

        communities[next_id] = merged
        active -= {a, b}
        active.add(next_id)
        merges.append((a, b, next_id, ds12))
        next_id += 1

    groups = sorted((communities[cid].vertices for cid in active), key=lambda vs: vs[0])
    labels = [0] * n
    for label, vertices in enumerate(groups, start=1):
        for v in vertices:
            labels[v] = label
    if len(groups) > k:
        logger.warning(
            "Graph splits into %d components; returning %d communities instead of %d",
            len(groups), len(groups), k,
        )
    return CommunityPartition(
        asset_ids=list(graph.asset_ids), labels=labels, k=len(groups), merge_trace=merges
    )
