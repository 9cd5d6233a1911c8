"""Beta comparison command."""

from __future__ import annotations

import itertools
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from grmkit.analysis.beta import VolKind, angle_degrees, annualized_market_vol, diagnose
from grmkit.engine.factors import BetaVector, FactorModel, Normalization, factor_beta, implied_beta
from grmkit.engine.grm import GrmModel
from grmkit.engine.panel import FactorPanel, align, center
from grmkit.errors import UsageError
from grmkit.generators.report import SummaryGenerator
from grmkit.tools.workspace import Workspace

logger = logging.getLogger(__name__)


class BetaTools:
    """Compare market betas of several fitted models."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace
        self.config = workspace.config

    def _beta(self, kind: str, model: Any) -> BetaVector:
        if isinstance(model, GrmModel):
            return implied_beta(model.omega_source, Normalization.MEAN_ONE)
        if isinstance(model, FactorModel):
            return factor_beta(model, Normalization.MEAN_ONE)
        raise UsageError(f"A {kind} model has no market beta")

    def beta(
        self,
        models: list[str | Path],
        input: str | Path | None,
        factors: str | Path | None = None,
        name: str = "betas",
    ) -> dict[str, Any]:
        """Betas, diagnostics, pairwise angles and market volatilities.

        Args:
            models: GRM, PCA or exogenous model files
            input: In-sample returns CSV for the projected volatilities
            factors: In-sample factor CSV for the first-factor volatility
            name: Output file stem

        Returns:
            Status, per-model diagnostics and written files
        """
        if not models:
            raise UsageError("--model is required")
        panel = self.workspace.read_returns(input)
        fac: FactorPanel | None = None
        if factors is not None:
            panel, fac = align(panel, self.workspace.read_factors(factors))
            fac = center(fac)
        panel = center(panel)

        betas: dict[str, BetaVector] = {}
        vols: dict[str, float] = {}
        penalties: dict[str, dict[str, float]] = {}
        for path in models:
            kind, model, document = self.workspace.load_model(path)
            label = str(document.get("label", kind))
            while label in betas:
                label += "'"
            b = self._beta(kind, model)
            if isinstance(model, GrmModel):
                est = model.omega_source
                penalties[label] = {"lambda": est.lam, "frobenius_weight": est.frobenius_weight}
            betas[label] = b
            vols[label] = annualized_market_vol(
                VolKind.PROJECTED, beta=b, panel=panel, trading_days=self.config.trading_days
            )
            if kind == "exogenous" and fac is not None:
                vols[f"{label}:first_factor"] = annualized_market_vol(
                    VolKind.EXOGENOUS_FIRST_FACTOR,
                    factors=fac,
                    trading_days=self.config.trading_days,
                )

        band = (self.config.beta_band[0], self.config.beta_band[1])
        diagnostics = [diagnose(b, band) for b in betas.values()]
        for label, d in zip(betas, diagnostics):
            d.source = label
        angles = {
            f"{a} vs {b}": angle_degrees(betas[a], betas[b])
            for a, b in itertools.combinations(betas, 2)
        }

        table = pd.DataFrame(
            {label: pd.Series(b.values, index=b.asset_ids) for label, b in betas.items()}
        )
        table.index.name = "symbol"
        outputs = [
            self.workspace.write_csv(f"{name}.csv", table, index=True),
            self.workspace.write_json(
                f"{name}.json",
                {
                    "diagnostics": [d.to_dict() for d in diagnostics],
                    "angles_degrees": angles,
                    "annualized_vol_pct": vols,
                    "penalties": penalties,
                    "betas": {label: b.to_dict() for label, b in betas.items()},
                },
            ),
            self.workspace.write_text(
                f"{name}.txt", SummaryGenerator().beta_summary(diagnostics, angles)
            ),
        ]
        return {
            "status": "compared",
            "diagnostics": [d.to_dict() for d in diagnostics],
            "angles_degrees": angles,
            "outputs": [str(p) for p in outputs],
        }
