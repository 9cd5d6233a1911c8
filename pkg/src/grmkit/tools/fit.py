"""Model fitting and variance decomposition commands."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import pandas as pd

from grmkit.engine.covariance import Divisor, sample_covariance
from grmkit.engine.factors import fit_exogenous, fit_pca
from grmkit.engine.grm import GrmModel, build_grm, decompose_variance
from grmkit.engine.interaction import fit_mixed, grm_weights, spatial_weights
from grmkit.engine.panel import FactorPanel, ReturnsPanel, align, center
from grmkit.engine.precision import (
    CrossValidation,
    Method,
    cross_validate,
    default_lambda_grid,
    fit_precision,
)
from grmkit.errors import UsageError
from grmkit.generators.report import SummaryGenerator
from grmkit.tools.workspace import Workspace

logger = logging.getLogger(__name__)

GRM_METHODS = {"glasso", "concord", "exact_inverse"}
DEFAULT_FOLDS = 5


class FitTools:
    """Fit every supported model kind and write it to the workspace."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace
        self.config = workspace.config
        self.summaries = SummaryGenerator()

    def fit(
        self,
        input: str | Path | None,
        method: str | None = None,
        factors: str | Path | None = None,
        distances: str | Path | None = None,
        model_name: str = "model.json",
    ) -> dict[str, Any]:
        """Fit a model on a returns panel.

        Args:
            input: Returns CSV
            method: glasso, concord, exact_inverse, pca, exogenous, spatial or mixed
            factors: Factor returns CSV (exogenous, spatial, mixed)
            distances: Distance matrix CSV (spatial)
            model_name: Model file name inside the output directory

        Returns:
            Status, model kind and written files
        """
        method = method or self.config.method
        panel = self.workspace.read_returns(input)
        outputs: list[Path] = []

        if method in GRM_METHODS:
            grm, cv = self.fit_grm(panel, method)
            outputs.append(
                self.workspace.save_model(
                    model_name,
                    "grm",
                    grm,
                    label=method,
                    cross_validation=cv.to_dict() if cv is not None else None,
                    sample=panel.summary(),
                )
            )
            summary = self.summaries.grm_summary(grm, cv)
            result: dict[str, Any] = {"kind": "grm", "lambda": grm.omega_source.lam}
        elif method == "pca":
            model = fit_pca(panel, self.config.k)
            outputs.append(
                self.workspace.save_model(
                    model_name, "pca", model, label="pca", sample=panel.summary()
                )
            )
            summary = self.summaries.factor_summary(model)
            result = {"kind": "pca", "k": model.k}
        elif method == "exogenous":
            panel, fac = self._with_factors(panel, factors, method)
            model = fit_exogenous(panel, fac)
            outputs.append(
                self.workspace.save_model(
                    model_name, "exogenous", model, label="exogenous", sample=panel.summary()
                )
            )
            summary = self.summaries.factor_summary(model)
            result = {"kind": "exogenous", "k": model.k}
        elif method in ("spatial", "mixed"):
            panel, fac = self._with_factors(panel, factors, method)
            mixed_result, summary, out = self._fit_interaction(
                panel, fac, method, distances, model_name
            )
            outputs.append(out)
            result = mixed_result
        else:
            raise UsageError(f"Unknown method '{method}'")

        outputs.append(self.workspace.write_text(Path(model_name).with_suffix(".txt"), summary))
        return {
            "status": "fitted",
            "method": method,
            **result,
            "outputs": [str(p) for p in outputs],
        }

    def _with_factors(
        self, panel: ReturnsPanel, factors: str | Path | None, method: str
    ) -> tuple[ReturnsPanel, FactorPanel]:
        fac = self.workspace.read_factors(self._need(factors, "--factors", method))
        return align(panel, fac)

    @staticmethod
    def _need(path: str | Path | None, flag: str, method: str) -> str | Path:
        if path is None:
            raise UsageError(f"{flag} is required for method '{method}'")
        return path

    def fit_grm(
        self, panel: ReturnsPanel, method: str = "glasso"
    ) -> tuple[GrmModel, CrossValidation | None]:
        """Precision estimate at a fixed lambda, or at the cross-validated one."""
        cfg = self.config
        S = sample_covariance(center(panel), Divisor(cfg.divisor))
        cv = None
        if method == "exact_inverse":
            lam = 0.0
        elif cfg.lam is not None and cfg.cv_folds is not None:
            raise UsageError("--lambda and --cv are mutually exclusive")
        elif cfg.lam is not None:
            lam = cfg.lam
        else:
            folds = cfg.cv_folds or DEFAULT_FOLDS
            grid = default_lambda_grid(S, num=cfg.grid_size, ratio=cfg.grid_ratio)
            cv = cross_validate(
                panel,
                method,
                grid,
                folds=folds,
                frobenius_weight=cfg.frobenius_weight,
                tol=cfg.tol,
                max_iter=cfg.max_iter,
                threads=cfg.resolved_threads(),
            )
            lam = cv.best_lambda
            logger.info("%d-fold cross-validation chose lambda=%.6g", folds, lam)

        est = fit_precision(
            S,
            Method(method),
            lam,
            frobenius_weight=cfg.frobenius_weight,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
        )
        return build_grm(est), cv

    def _fit_interaction(
        self,
        panel: ReturnsPanel,
        factors: FactorPanel,
        method: str,
        distances: str | Path | None,
        model_name: str,
    ) -> tuple[dict[str, Any], str, Path]:
        cfg = self.config
        extra: dict[str, Any] = {"label": method, "sample": panel.summary()}
        if method == "spatial":
            dist = self.workspace.read_distances(self._need(distances, "--distances", method))
            weights = spatial_weights(dist.reorder(panel.asset_ids))
        else:
            grm, cv = self.fit_grm(panel, "glasso")
            weights = grm_weights(grm)
            extra["precision"] = grm.omega_source.to_dict()
            extra["cross_validation"] = cv.to_dict() if cv is not None else None

        model = fit_mixed(
            panel,
            factors,
            weights,
            bounds=cfg.mixed_bounds,
            grid_size=cfg.mixed_grid_size,
            threads=cfg.resolved_threads(),
        )
        out = self.workspace.save_model(model_name, method, model, **extra)
        return {"kind": method, "rho": model.rho}, self.summaries.mixed_summary(model), out

    def decompose(
        self, model: str | Path | None, input: str | Path | None, name: str = "decomposition.csv"
    ) -> dict[str, Any]:
        """Per-asset total, endogenous and residual variance of a GRM on a panel.

        Args:
            model: GRM model file
            input: Returns CSV whose sample covariance is decomposed
            name: Output CSV name

        Returns:
            Status and written files
        """
        kind, grm, _ = self.workspace.load_model(model)
        if not isinstance(grm, GrmModel):
            raise UsageError(f"decompose needs a GRM model, got '{kind}'")
        panel = self.workspace.read_returns(input).reorder(grm.asset_ids)
        S = sample_covariance(center(panel), Divisor(self.config.divisor))
        dec = decompose_variance(grm, S)
        csv_path = self.workspace.write_csv(name, pd.DataFrame(dec.to_rows()))
        txt_path = self.workspace.write_text(
            Path(name).with_suffix(".txt"), self.summaries.decomposition_summary(dec)
        )
        return {"status": "decomposed", "assets": grm.p, "outputs": [str(csv_path), str(txt_path)]}
