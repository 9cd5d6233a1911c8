"""Graph export and community detection commands."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import pandas as pd

from grmkit.analysis.market_graph import (
    CommunityPartition,
    PartialCorrelationGraph,
    graph_from_precision,
    ratio_matrix,
    sector_community_counts,
    threshold_pca_graph,
)
from grmkit.analysis.walktrap import walktrap
from grmkit.engine.covariance import Divisor, sample_covariance
from grmkit.engine.grm import GrmModel
from grmkit.engine.panel import SectorMap, center
from grmkit.errors import UsageError
from grmkit.generators.graph_export import GraphFormat, export_graph
from grmkit.generators.report import SummaryGenerator
from grmkit.tools.workspace import Workspace

logger = logging.getLogger(__name__)


class GraphTools:
    """Partial-correlation graphs of fitted GRMs and their communities."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace
        self.config = workspace.config
        self.summaries = SummaryGenerator()

    def _grm_graph(self, model: str | Path | None) -> PartialCorrelationGraph:
        kind, grm, _ = self.workspace.load_model(model)
        if not isinstance(grm, GrmModel):
            raise UsageError(f"Graphs need a GRM model, got '{kind}'")
        return graph_from_precision(grm.omega_source)

    def _ratio_outputs(
        self,
        graph: PartialCorrelationGraph,
        grouping: SectorMap | CommunityPartition,
        stem: str,
    ) -> list[Path]:
        ratios = ratio_matrix(graph, grouping)
        return [
            self.workspace.write_csv(f"{stem}.csv", ratios.to_frame(scaled=True), index=True),
            self.workspace.write_json(f"{stem}.json", ratios.to_dict()),
        ]

    def graph(
        self,
        model: str | Path | None = None,
        format: str = "graphml",
        sectors: str | Path | None = None,
        input: str | Path | None = None,
        pca_k: int | None = None,
        target_edges: int | None = None,
        name: str = "graph",
    ) -> dict[str, Any]:
        """Export a partial-correlation graph.

        With ``pca_k`` the graph is the hard-thresholded PCA plug-in graph of
        ``input`` instead; ``target_edges`` defaults to the edge count of the
        GRM graph when a model is also given.

        Args:
            model: GRM model file
            format: graphml, dot or json
            sectors: Optional sector map CSV
            input: Returns CSV (PCA graph)
            pca_k: Number of principal components (PCA graph)
            target_edges: Edge budget of the PCA graph
            name: Output file stem

        Returns:
            Status, edge count and written files
        """
        try:
            fmt = GraphFormat(format)
        except ValueError as e:
            raise UsageError(f"Unknown graph format '{format}'") from e

        if pca_k is not None:
            if target_edges is None:
                if model is None:
                    raise UsageError("--target-edges or --model is required for a PCA graph")
                target_edges = self._grm_graph(model).edge_count()
            panel = self.workspace.read_returns(input)
            S = sample_covariance(center(panel), Divisor(self.config.divisor))
            graph = threshold_pca_graph(S, pca_k, target_edges)
        else:
            graph = self._grm_graph(model)

        sector_map = self.workspace.read_sectors(sectors) if sectors is not None else None
        outputs = [
            export_graph(graph, self.workspace.path(f"{name}.{fmt.value}"), fmt, sectors=sector_map)
        ]
        outputs.append(self.workspace.write_json(f"{name}_edges.json", graph.to_dict()))
        if sector_map is not None:
            outputs += self._ratio_outputs(graph, sector_map, f"{name}_sector_ratio")
        outputs.append(
            self.workspace.write_text(f"{name}.txt", self.summaries.graph_summary(graph))
        )
        return {
            "status": "exported",
            "source": graph.source.value,
            "edges": graph.edge_count(),
            "threshold": graph.threshold,
            "outputs": [str(p) for p in outputs],
        }

    def communities(
        self,
        model: str | Path | None,
        k: int | None = None,
        walk_length: int | None = None,
        sectors: str | Path | None = None,
        name: str = "communities",
    ) -> dict[str, Any]:
        """Random-walk communities of a GRM graph.

        Args:
            model: GRM model file
            k: Number of communities to cut the dendrogram at
            walk_length: Random-walk length
            sectors: Optional sector map CSV for cross-tabulation
            name: Output file stem

        Returns:
            Status, community count and written files
        """
        graph = self._grm_graph(model)
        partition = walktrap(
            graph,
            walk_length=walk_length or self.config.walk_length,
            k=k or self.config.communities,
        )
        labels = pd.DataFrame({"symbol": partition.asset_ids, "community": partition.labels})
        outputs = [
            self.workspace.write_csv(f"{name}.csv", labels),
            self.workspace.write_json(f"{name}.json", partition.to_dict()),
        ]
        outputs += self._ratio_outputs(graph, partition, f"{name}_ratio")
        if sectors is not None:
            sector_map = self.workspace.read_sectors(sectors)
            counts = sector_community_counts(sector_map, partition)
            outputs.append(self.workspace.write_csv(f"{name}_by_sector.csv", counts, index=True))
            outputs += self._ratio_outputs(graph, sector_map, f"{name}_sector_ratio")
        outputs.append(
            self.workspace.write_text(
                f"{name}.txt", self.summaries.graph_summary(graph, partition)
            )
        )
        return {"status": "partitioned", "k": partition.k, "outputs": [str(p) for p in outputs]}
