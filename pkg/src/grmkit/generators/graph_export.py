"""GraphML, DOT and JSON export of partial-correlation graphs."""

from __future__ import annotations

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any

import networkx as nx

from grmkit.analysis.market_graph import (
    CommunityPartition,
    GraphSource,
    PartialCorrelationGraph,
)
from grmkit.engine.panel import SectorMap
from grmkit.errors import IoFailureError

logger = logging.getLogger(__name__)

POSITIVE_COLOR = "blue"
NEGATIVE_COLOR = "red"
WIDTH_SCALE = 4.0


class GraphFormat(str, Enum):
    GRAPHML = "graphml"
    DOT = "dot"
    JSON = "json"


class GraphExporter:
    """Write a market graph with sign, color and group attributes."""

    def __init__(self, width_scale: float = WIDTH_SCALE):
        self.width_scale = width_scale

    def build(
        self,
        graph: PartialCorrelationGraph,
        partition: CommunityPartition | None = None,
        sectors: SectorMap | None = None,
    ) -> nx.Graph:
        """networkx graph keyed by symbol, nodes and edges in sorted order."""
        g = nx.Graph(source=graph.source.value)
        if graph.threshold is not None:
            g.graph["threshold"] = graph.threshold
        for idx in sorted(range(graph.p), key=lambda i: graph.asset_ids[i]):
            sym = graph.asset_ids[idx]
            attrs: dict[str, Any] = {}
            if partition is not None:
                label = partition.label_of(sym)
                if label is not None:
                    attrs["community"] = label
            if sectors is not None:
                sector = sectors.label_of(sym)
                if sector is not None:
                    attrs["sector"] = sector
            g.add_node(sym, **attrs)

        named = []
        for i, j, w in graph.edges:
            u, v = sorted((graph.asset_ids[i], graph.asset_ids[j]))
            named.append((u, v, w))
        for u, v, w in sorted(named):
            g.add_edge(
                u,
                v,
                weight=w,
                sign=1 if w > 0 else -1,
                color=POSITIVE_COLOR if w > 0 else NEGATIVE_COLOR,
                width=abs(w) * self.width_scale,
            )
        return g

    def to_dict(self, g: nx.Graph) -> dict[str, Any]:
        return {
            "graph": dict(sorted(g.graph.items())),
            "nodes": [{"id": n, **dict(sorted(a.items()))} for n, a in g.nodes(data=True)],
            "edges": [
                {"source": u, "target": v, **dict(sorted(a.items()))}
                for u, v, a in g.edges(data=True)
            ],
        }

    def write(self, g: nx.Graph, path: Path, format: GraphFormat) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        if format is GraphFormat.GRAPHML:
            nx.write_graphml(g, path)
        elif format is GraphFormat.DOT:
            nx.nx_pydot.write_dot(g, path)
        else:
            with open(path, "w") as f:
                json.dump(self.to_dict(g), f, indent=2)
                f.write("\n")
        return path


def export_graph(
    graph: PartialCorrelationGraph,
    path: str | Path,
    format: GraphFormat | str = GraphFormat.GRAPHML,
    partition: CommunityPartition | None = None,
    sectors: SectorMap | None = None,
) -> Path:
    """Serialize ``graph`` to ``path``; edge attributes are weight, sign, color and width."""
    format = GraphFormat(format)
    exporter = GraphExporter()
    try:
        out = exporter.write(exporter.build(graph, partition, sectors), Path(path), format)
    except (OSError, ImportError) as e:
        raise IoFailureError(f"Cannot write {format.value} graph to {path}: {e}") from e
    logger.info("Wrote %d-edge graph to %s", graph.edge_count(), out)
    return out


def import_graph_json(path: str | Path) -> PartialCorrelationGraph:
    """Read back a graph written by :func:`export_graph` in json format."""
    path = Path(path)
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise IoFailureError(f"Cannot read graph from {path}: {e}") from e
    try:
        asset_ids = [node["id"] for node in data["nodes"]]
        pos = {sym: i for i, sym in enumerate(asset_ids)}
        edges = []
        for e in data["edges"]:
            i, j = sorted((pos[e["source"]], pos[e["target"]]))
            edges.append((i, j, float(e["weight"])))
        meta = data.get("graph", {})
        return PartialCorrelationGraph(
            asset_ids=asset_ids,
            edges=sorted(edges),
            source=GraphSource(meta.get("source", GraphSource.GLASSO.value)),
            threshold=meta.get("threshold"),
        )
    except (KeyError, ValueError) as e:
        raise IoFailureError(f"Malformed graph file {path}: {e}") from e
