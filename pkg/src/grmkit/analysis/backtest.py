"""Rolling recalibration: fit on a window, score R^2 on the block after it."""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from grmkit.analysis.evaluation import r2_mean
from grmkit.engine.covariance import Divisor, sample_covariance
from grmkit.engine.factors import fit_pca, predict_factor
from grmkit.engine.grm import build_grm, predict
from grmkit.engine.panel import ReturnsPanel, center
from grmkit.engine.precision import DEFAULT_MAX_ITER, DEFAULT_TOL, Method, fit_precision
from grmkit.errors import GrmError, InsufficientHistoryError

logger = logging.getLogger(__name__)

Predictor = Callable[[ReturnsPanel], ReturnsPanel]
Recipe = Callable[[ReturnsPanel], Predictor]


@dataclass
class BacktestPeriod:
    period: int
    fit_start: str
    fit_end: str
    test_start: str
    test_end: str
    r2_mean: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "period": self.period,
            "fit_start": self.fit_start,
            "fit_end": self.fit_end,
            "test_start": self.test_start,
            "test_end": self.test_end,
            "r2_mean": self.r2_mean,
        }


def grm_recipe(
    method: Method | str = Method.GLASSO,
    lam: float = 0.0,
    frobenius_weight: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Recipe:
    """Fit a precision estimate on the window and predict with ``A y``."""

    def fit(window: ReturnsPanel) -> Predictor:
        S = sample_covariance(center(window), Divisor.N)
        est = fit_precision(
            S, method, lam, frobenius_weight=frobenius_weight, tol=tol, max_iter=max_iter
        )
        grm = build_grm(est)
        return lambda out: predict(grm, out)

    return fit


def pca_recipe(k: int) -> Recipe:
    """Project each held-out observation on the window's top-k components."""

    def fit(window: ReturnsPanel) -> Predictor:
        model = fit_pca(window, k)
        return lambda out: predict_factor(model, out)

    return fit


def _run_period(
    panel: ReturnsPanel, recipe: Recipe, period: int, window: int, step: int
) -> BacktestPeriod:
    start = period * step
    fit_cols = slice(start, start + window)
    test_cols = slice(start + window, start + window + step)
    fit_panel = center(panel.columns(fit_cols))
    test_panel = center(panel.columns(test_cols))
    predicted = recipe(fit_panel)(test_panel)
    score = r2_mean(predicted, test_panel)
    return BacktestPeriod(
        period=period,
        fit_start=fit_panel.timestamps[0].isoformat(),
        fit_end=fit_panel.timestamps[-1].isoformat(),
        test_start=test_panel.timestamps[0].isoformat(),
        test_end=test_panel.timestamps[-1].isoformat(),
        r2_mean=score,
    )


def rolling_backtest(
    panel: ReturnsPanel,
    recipe: Recipe,
    window: int,
    step: int,
    threads: int | None = None,
) -> list[BacktestPeriod]:
    """Score ``floor((n - window) / step)`` consecutive out-of-sample blocks.

    Period ``t`` fits on columns ``[t*step, t*step + window)`` and scores the
    next ``step`` columns. Each block is centered with its own means.
    """
    if window < 2 or step < 2:
        raise GrmError("window and step must each cover at least 2 observations")
    periods = (panel.n - window) // step
    if periods < 1:
        raise InsufficientHistoryError(
            f"window={window} and step={step} need {window + step} observations, have {panel.n}"
        )
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_run_period, panel, recipe, t, window, step) for t in range(periods)
        ]
        results = [f.result() for f in futures]
    scores = np.array([r.r2_mean for r in results])
    logger.info("Backtest over %d periods: mean R2 %.4f", periods, scores.mean())
    return results
