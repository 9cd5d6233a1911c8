"""Output generators for graph files and text summaries."""

from grmkit.generators.graph_export import (
    GraphExporter,
    GraphFormat,
    export_graph,
    import_graph_json,
)
from grmkit.generators.report import SummaryGenerator

__all__ = [
    "GraphExporter",
    "GraphFormat",
    "SummaryGenerator",
    "export_graph",
    "import_graph_json",
]
