"""Rolling backtest command."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from grmkit.analysis.backtest import Recipe, grm_recipe, pca_recipe, rolling_backtest
from grmkit.errors import UsageError
from grmkit.generators.report import SummaryGenerator
from grmkit.tools.workspace import Workspace

logger = logging.getLogger(__name__)

RECIPES = ("glasso", "concord", "pca")


class BacktestTools:
    """Rolling out-of-sample R^2 of one or more model recipes."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace
        self.config = workspace.config

    def _recipe(self, name: str) -> Recipe:
        cfg = self.config
        if name == "pca":
            return pca_recipe(cfg.k)
        if cfg.lam is None:
            raise UsageError(f"--lambda is required for the {name} recipe")
        return grm_recipe(name, cfg.lam, cfg.frobenius_weight, cfg.tol, cfg.max_iter)

    def backtest(
        self,
        input: str | Path | None,
        window: int,
        step: int,
        recipes: list[str] | None = None,
        name: str = "backtest",
    ) -> dict[str, Any]:
        """Run each recipe over the same rolling windows.

        Args:
            input: Returns CSV
            window: Fitting window length in observations
            step: Evaluation block length and stride
            recipes: Any of glasso, concord, pca
            name: Output file stem

        Returns:
            Status, mean R^2 per recipe and written files
        """
        recipes = recipes or ["glasso", "pca"]
        unknown = [r for r in recipes if r not in RECIPES]
        if unknown:
            raise UsageError(f"Unknown recipe '{unknown[0]}', expected one of {list(RECIPES)}")
        panel = self.workspace.read_returns(input)
        threads = self.config.resolved_threads()

        rows: list[dict[str, Any]] = []
        means: dict[str, float] = {}
        text = ""
        for label in recipes:
            periods = rolling_backtest(panel, self._recipe(label), window, step, threads=threads)
            rows += [{"recipe": label, **p.to_dict()} for p in periods]
            means[label] = float(np.mean([p.r2_mean for p in periods]))
            text += SummaryGenerator().backtest_summary(label, periods) + "\n"

        outputs = [
            self.workspace.write_csv(f"{name}.csv", pd.DataFrame(rows)),
            self.workspace.write_json(
                f"{name}.json",
                {"window": window, "step": step, "periods": rows, "mean_r2": means},
            ),
            self.workspace.write_text(f"{name}.txt", text),
        ]
        return {"status": "backtested", "mean_r2": means, "outputs": [str(p) for p in outputs]}
