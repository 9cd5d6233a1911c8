"""Out-of-sample evaluation command."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from grmkit.analysis.evaluation import (
    EvalReport,
    ModelDescriptor,
    count_parameters,
    evaluate,
    write_reports,
)
from grmkit.engine.factors import FactorModel, predict_factor
from grmkit.engine.grm import GrmModel, predict
from grmkit.engine.interaction import MixedModel, predict_mixed
from grmkit.engine.panel import FactorPanel, ReturnsPanel, align, center
from grmkit.engine.precision import PrecisionEstimate
from grmkit.errors import UsageError
from grmkit.generators.report import SummaryGenerator
from grmkit.tools.workspace import FittedModel, Workspace

logger = logging.getLogger(__name__)


class EvalTools:
    """Score fitted models on a held-out panel."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace

    def evaluate(
        self,
        models: list[str | Path],
        input: str | Path | None,
        factors: str | Path | None = None,
        name: str = "report.csv",
    ) -> dict[str, Any]:
        """Evaluate each model file on the out-of-sample returns.

        Args:
            models: Model files written by ``fit``
            input: Out-of-sample returns CSV
            factors: Out-of-sample factor returns CSV
            name: Report CSV name; the JSON report shares its stem

        Returns:
            Status, per-model metrics and written files
        """
        if not models:
            raise UsageError("--model is required")
        loaded = [self.workspace.load_model(path) for path in models]
        needs_factors = [kind for kind, *_ in loaded if kind in ("exogenous", "spatial", "mixed")]
        if needs_factors and factors is None:
            raise UsageError(f"--factors is required to evaluate {needs_factors[0]} models")

        actual = self.workspace.read_returns(input)
        out_factors: FactorPanel | None = None
        if factors is not None:
            actual, out_factors = align(actual, self.workspace.read_factors(factors))
            out_factors = center(out_factors)
        actual = center(actual)

        reports: list[EvalReport] = []
        seen: dict[str, int] = {}
        for kind, model, document in loaded:
            label = str(document.get("label", kind))
            seen[label] = seen.get(label, 0) + 1
            if seen[label] > 1:
                label = f"{label}#{seen[label]}"
            predicted = self._predict(kind, model, actual, out_factors)
            kappa = count_parameters(self._descriptor(kind, model, document))
            reports.append(evaluate(label, predicted, actual, kappa))

        csv_path = self.workspace.path(name)
        written = write_reports(reports, csv_path, csv_path.with_suffix(".json"))
        written.append(
            self.workspace.write_text(
                Path(name).with_suffix(".txt"), SummaryGenerator().evaluation_summary(reports)
            )
        )
        return {
            "status": "evaluated",
            "reports": [r.to_row() for r in sorted(reports, key=lambda r: r.model_label)],
            "outputs": [str(p) for p in written],
        }

    @staticmethod
    def _predict(
        kind: str, model: FittedModel, actual: ReturnsPanel, factors: FactorPanel | None
    ) -> ReturnsPanel:
        if isinstance(model, GrmModel):
            return predict(model, actual)
        if isinstance(model, FactorModel):
            return predict_factor(model, actual, factors)
        if factors is None:
            raise UsageError(f"--factors is required to evaluate {kind} models")
        return predict_mixed(model, actual, factors)

    @staticmethod
    def _descriptor(kind: str, model: FittedModel, document: dict[str, Any]) -> ModelDescriptor:
        if isinstance(model, GrmModel):
            return ModelDescriptor("grm", model.p, zeros=model.omega_source.zero_count())
        if isinstance(model, FactorModel):
            return ModelDescriptor(kind, len(model.asset_ids), model.k)
        assert isinstance(model, MixedModel)
        zeros = 0
        if kind == "mixed":
            zeros = PrecisionEstimate.from_dict(document["precision"]).zero_count()
        return ModelDescriptor(kind, len(model.asset_ids), model.k, zeros)
