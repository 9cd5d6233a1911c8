"""Tests for partial-correlation graphs and sector ratios."""

import math

import numpy as np
import pytest

from grmkit.analysis.market_graph import (
    CommunityPartition,
    GraphSource,
    PartialCorrelationGraph,
    graph_from_precision,
    partial_correlation_matrix,
    pca_plugin_precision,
    ratio_matrix,
    sector_community_counts,
    threshold_pca_graph,
)
from grmkit.engine.covariance import CovarianceEstimate, sample_covariance
from grmkit.engine.panel import SectorMap, center
from grmkit.engine.precision import Method, PrecisionEstimate, exact_inverse
from grmkit.errors import GrmError, UncoveredVertexError, UnreachableTargetError
from tests.conftest import make_panel


def _graph(p: int, edges: list[tuple[int, int, float]]) -> PartialCorrelationGraph:
    return PartialCorrelationGraph(
        asset_ids=[f"A{i + 1}" for i in range(p)], edges=edges, source=GraphSource.GLASSO
    )


@pytest.fixture
def sample_S(rng):
    panel = make_panel(rng.normal(size=(10, 200)))
    return sample_covariance(center(panel))


class TestPartialCorrelation:
    """Tests for partial_correlation_matrix and graph_from_precision."""

    def test_diagonal_precision_has_no_partial_correlation(self):
        np.testing.assert_array_equal(partial_correlation_matrix(np.diag([1.0, 2.0, 3.0])), 0.0)

    def test_two_by_two(self):
        P = partial_correlation_matrix(np.array([[4.0, -2.0], [-2.0, 4.0]]))
        assert P[0, 1] == pytest.approx(0.5)
        assert P[0, 0] == 0.0

    def test_inverse_of_example_covariance(self, example_sigma):
        est = exact_inverse(CovarianceEstimate.from_matrix(None, example_sigma))
        assert partial_correlation_matrix(est)[0, 1] == pytest.approx(0.5)

    def test_graph_edges_follow_support(self):
        omega = np.array([[2.0, -0.5, 0.0], [-0.5, 2.0, 0.3], [0.0, 0.3, 2.0]])
        est = PrecisionEstimate(asset_ids=["X", "Y", "Z"], omega=omega, method=Method.GLASSO)
        graph = graph_from_precision(est)
        assert graph.source is GraphSource.GLASSO
        assert [(i, j) for i, j, _ in graph.edges] == [(0, 1), (1, 2)]
        assert graph.edges[0][2] == pytest.approx(0.25)
        assert graph.edges[1][2] == pytest.approx(-0.15)


class TestPcaGraph:
    """Tests for the thresholded PCA plug-in graph."""

    def test_plugin_is_precision(self, sample_S):
        est = pca_plugin_precision(sample_S, 2)
        assert est.method is Method.PCA_PLUGIN
        np.testing.assert_allclose(est.omega, est.omega.T)
        assert np.all(np.linalg.eigvalsh(est.omega) > 0)

    @pytest.mark.parametrize("k", [0, 10])
    def test_component_count_range(self, sample_S, k):
        with pytest.raises(GrmError):
            pca_plugin_precision(sample_S, k)

    def test_zero_target(self, sample_S):
        assert threshold_pca_graph(sample_S, 2, 0).edge_count() == 0

    def test_full_target_keeps_every_nonzero_pair(self, sample_S):
        graph = threshold_pca_graph(sample_S, 2, 45)
        assert graph.threshold == 0.0
        assert graph.edge_count() == 45

    def test_target_is_an_upper_bound(self, sample_S):
        graph = threshold_pca_graph(sample_S, 2, 12)
        assert graph.edge_count() <= 12
        assert graph.source is GraphSource.PCA_THRESHOLD

    def test_edges_nested_in_target(self, sample_S):
        small = {(i, j) for i, j, _ in threshold_pca_graph(sample_S, 2, 5).edges}
        large = {(i, j) for i, j, _ in threshold_pca_graph(sample_S, 2, 12).edges}
        assert small <= large

    def test_unreachable_target(self, sample_S):
        with pytest.raises(UnreachableTargetError):
            threshold_pca_graph(sample_S, 2, 46)


class TestRatioMatrix:
    """Tests for ratio_matrix and sector_community_counts."""

    def test_balanced_counts_give_zero(self):
        graph = _graph(4, [(0, 2, 0.2), (1, 3, -0.2)])
        sectors = SectorMap({"A1": "X", "A2": "X", "A3": "Y", "A4": "Y"})
        ratios = ratio_matrix(graph, sectors)
        np.testing.assert_allclose(ratios.phi, 0.0)

    def test_log_two(self):
        cross = [(i, j) for i in range(4) for j in range(4, 8)]
        edges = [(i, j, 0.1) for i, j in cross[:9]] + [(i, j, -0.1) for i, j in cross[9:13]]
        sectors = SectorMap({f"A{i + 1}": ("X" if i < 4 else "Y") for i in range(8)})
        ratios = ratio_matrix(_graph(8, edges), sectors)
        assert ratios.group_labels == ["X", "Y"]
        assert ratios.counts_pos[0, 1] == 9
        assert ratios.counts_neg[1, 0] == 4
        assert ratios.phi[0, 1] == pytest.approx(math.log(2.0))
        assert ratios.phi_scaled[0, 1] == pytest.approx(1.0)
        assert ratios.phi[0, 0] == 0.0

    def test_single_positive_group(self):
        edges = [(0, 1, 0.3), (1, 2, 0.1), (0, 2, 0.2)]
        sectors = SectorMap({"A1": "X", "A2": "X", "A3": "X"})
        ratios = ratio_matrix(_graph(3, edges), sectors)
        assert ratios.phi[0, 0] == pytest.approx(math.log(4.0))
        assert ratios.phi_scaled[0, 0] == pytest.approx(1.0)

    def test_communities_as_groups(self):
        partition = CommunityPartition(asset_ids=["A1", "A2", "A3"], labels=[2, 1, 2], k=2)
        ratios = ratio_matrix(_graph(3, [(0, 2, 0.4)]), partition)
        assert ratios.group_labels == ["1", "2"]
        assert ratios.phi[1, 1] == pytest.approx(math.log(2.0))

    def test_uncovered_vertex(self):
        with pytest.raises(UncoveredVertexError):
            ratio_matrix(_graph(2, [(0, 1, 0.1)]), SectorMap({"A1": "X"}))

    def test_sector_community_counts(self):
        sectors = SectorMap({"A1": "X", "A2": "X", "A3": "Y"})
        partition = CommunityPartition(asset_ids=["A1", "A2", "A3"], labels=[1, 2, 2], k=2)
        counts = sector_community_counts(sectors, partition)
        assert counts.loc["X", 1] == 1
        assert counts.loc["X", 2] == 1
        assert counts.loc["Y", 2] == 1
        assert counts.loc["Y", 1] == 0
