"""Plain-text summaries written next to the JSON outputs."""

from __future__ import annotations

import numpy as np

from grmkit.analysis.backtest import BacktestPeriod
from grmkit.analysis.beta import BetaDiagnostics
from grmkit.analysis.evaluation import EvalReport
from grmkit.analysis.market_graph import CommunityPartition, PartialCorrelationGraph
from grmkit.engine.factors import FactorModel
from grmkit.engine.grm import GrmModel, VarianceDecomposition
from grmkit.engine.interaction import MixedModel
from grmkit.engine.precision import CrossValidation


class SummaryGenerator:
    """Human-readable digests of fitted models and analyses."""

    @staticmethod
    def _header(title: str) -> list[str]:
        return [title, "=" * len(title), ""]

    def grm_summary(self, grm: GrmModel, cv: CrossValidation | None = None) -> str:
        est = grm.omega_source
        lines = self._header(f"GRM fitted with {est.method.value}")
        lines.append(f"Assets:            {grm.p}")
        lines.append(f"Lambda:            {est.lam:.6g}")
        if est.frobenius_weight:
            lines.append(f"Frobenius weight:  {est.frobenius_weight:.6g}")
        lines.append(f"Edges:             {est.edge_count()} of {grm.p * (grm.p - 1) // 2}")
        lines.append(f"Sweeps:            {est.iterations}")
        if est.kkt is not None:
            lines.append(f"KKT residual:      {est.kkt:.3g}")
        if cv is not None:
            lines.append("")
            lines.append(f"Cross-validation chose lambda = {cv.best_lambda:.6g}")
            for lam, err in zip(cv.grid, cv.cv_errors):
                mark = " *" if lam == cv.best_lambda else ""
                lines.append(f"  {lam:12.6g}  {err:.6g}{mark}")
        degree = (grm.A != 0).sum(axis=1)
        lines.append("")
        lines.append(f"Mean neighbours per asset: {degree.mean():.2f}")
        return "\n".join(lines) + "\n"

    def factor_summary(self, model: FactorModel) -> str:
        lines = self._header(f"{model.kind.value} factor model")
        lines.append(f"Assets:  {len(model.asset_ids)}")
        lines.append(f"Factors: {', '.join(model.factor_names)}")
        if model.eigenvalues is not None:
            lines.append("Eigenvalues: " + ", ".join(f"{v:.6g}" for v in model.eigenvalues))
        exposures = ", ".join(f"{v:.4f}" for v in model.B.mean(axis=0))
        lines.append(f"Mean exposure per factor: {exposures}")
        return "\n".join(lines) + "\n"

    def mixed_summary(self, model: MixedModel) -> str:
        lines = self._header(f"Interaction model ({model.weights.source.value} weights)")
        lines.append(f"Assets:    {len(model.asset_ids)}")
        lines.append(f"Factors:   {', '.join(model.factor_names)}")
        lines.append(f"rho:       {model.rho:.6g}")
        lo, hi = model.search_bounds
        lines.append(f"Searched:  [{lo:g}, {hi:g}]")
        lines.append(f"Objective: {model.objective_value:.6g}")
        return "\n".join(lines) + "\n"

    def decomposition_summary(self, dec: VarianceDecomposition) -> str:
        share = dec.endogenous_share()
        lines = self._header("Variance decomposition")
        lines.append(f"Mean endogenous share: {np.mean(share):.2%}")
        top = np.argsort(share)[::-1][:5]
        lines.append("Most endogenous assets:")
        for i in top:
            lines.append(f"  {dec.asset_ids[i]:<10} {share[i]:.2%}")
        return "\n".join(lines) + "\n"

    def evaluation_summary(self, reports: list[EvalReport]) -> str:
        lines = self._header("Out-of-sample evaluation")
        lines.append(f"{'model':<16}{'rmse':>12}{'rmse %':>10}{'bic':>14}{'R2':>9}{'kappa':>8}")
        for r in sorted(reports, key=lambda r: r.model_label):
            lines.append(
                f"{r.model_label:<16}{r.rmse:12.6g}{r.rmse_pct:10.2f}{r.bic:14.6g}"
                f"{r.r2_mean:9.4f}{r.kappa:8d}"
            )
        return "\n".join(lines) + "\n"

    def graph_summary(
        self, graph: PartialCorrelationGraph, partition: CommunityPartition | None = None
    ) -> str:
        lines = self._header(f"Partial-correlation graph ({graph.source.value})")
        pos = sum(1 for *_, w in graph.edges if w > 0)
        lines.append(f"Vertices: {graph.p}")
        neg = graph.edge_count() - pos
        lines.append(f"Edges:    {graph.edge_count()} ({pos} positive, {neg} negative)")
        if graph.threshold is not None:
            lines.append(f"Threshold: {graph.threshold:.6g}")
        if partition is not None:
            sizes = np.bincount(partition.labels)[1:]
            lines.append(f"Communities: {partition.k} (sizes {', '.join(str(s) for s in sizes)})")
        return "\n".join(lines) + "\n"

    def beta_summary(self, diagnostics: list[BetaDiagnostics], angles: dict[str, float]) -> str:
        lines = self._header("Beta comparison")
        for d in diagnostics:
            lo, hi = d.band
            lines.append(
                f"{d.source:<24} positive {d.fraction_positive:.1%}  "
                f"in [{lo:g}, {hi:g}] {d.fraction_within_band:.1%}  dispersion {d.dispersion:.4f}"
            )
        for pair, angle in angles.items():
            lines.append(f"angle {pair}: {angle:.2f} deg")
        return "\n".join(lines) + "\n"

    def backtest_summary(self, label: str, periods: list[BacktestPeriod]) -> str:
        lines = self._header(f"Rolling backtest: {label}")
        for p in periods:
            lines.append(f"  {p.period:3d}  {p.test_start} .. {p.test_end}  R2 {p.r2_mean:.4f}")
        lines.append(f"Mean R2: {np.mean([p.r2_mean for p in periods]):.4f}")
        return "\n".join(lines) + "\n"
