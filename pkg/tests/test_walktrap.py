"""Tests for random-walk community detection."""

import itertools

import networkx as nx
import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from grmkit.analysis.market_graph import GraphSource, PartialCorrelationGraph
from grmkit.analysis.walktrap import walktrap
from grmkit.errors import EmptyGraphError, GrmError


def _graph_of(g: nx.Graph) -> PartialCorrelationGraph:
    edges = sorted((min(u, v), max(u, v), 0.1) for u, v in g.edges())
    return PartialCorrelationGraph(
        asset_ids=[f"A{i + 1}" for i in range(g.number_of_nodes())],
        edges=edges,
        source=GraphSource.GLASSO,
    )


def _agreement(truth: list[int], found: list[int]) -> float:
    t_labels, f_labels = sorted(set(truth)), sorted(set(found))
    confusion = np.zeros((len(t_labels), len(f_labels)))
    for t, f in zip(truth, found):
        confusion[t_labels.index(t), f_labels.index(f)] += 1
    rows, cols = linear_sum_assignment(-confusion)
    return confusion[rows, cols].sum() / len(truth)


class TestWalktrap:
    """Tests for walktrap."""

    def test_two_cliques(self):
        g = nx.Graph()
        g.add_edges_from(itertools.combinations(range(5), 2))
        g.add_edges_from(itertools.combinations(range(5, 10), 2))
        partition = walktrap(_graph_of(g), k=2)
        assert partition.k == 2
        assert partition.labels == [1] * 5 + [2] * 5

    def test_single_vertex(self):
        graph = PartialCorrelationGraph(asset_ids=["A1"], edges=[], source=GraphSource.GLASSO)
        partition = walktrap(graph, k=3)
        assert partition.labels == [1]
        assert partition.k == 1

    def test_merges_down_to_k(self):
        partition = walktrap(_graph_of(nx.path_graph(8)), k=1)
        assert partition.k == 1
        assert len(partition.merge_trace) == 7

    def test_planted_partition(self):
        for seed in range(100):
            g = nx.random_partition_graph([20, 20, 20], 0.3, 0.02, seed=seed)
            if nx.is_connected(g):
                break
        truth = [v // 20 for v in range(60)]
        partition = walktrap(_graph_of(g), walk_length=4, k=3)
        assert partition.k == 3
        assert _agreement(truth, partition.labels) >= 0.95

    def test_empty_graph(self):
        graph = PartialCorrelationGraph(asset_ids=[], edges=[], source=GraphSource.GLASSO)
        with pytest.raises(EmptyGraphError):
            walktrap(graph)

    @pytest.mark.parametrize("kwargs", [{"k": 0}, {"walk_length": 0}])
    def test_bad_parameters(self, kwargs):
        with pytest.raises(GrmError):
            walktrap(_graph_of(nx.path_graph(3)), **kwargs)
