"""Scoring, beta comparisons and market-graph analytics."""

from grmkit.analysis.backtest import BacktestPeriod, grm_recipe, pca_recipe, rolling_backtest
from grmkit.analysis.beta import angle_degrees, annualized_market_vol, beta_diagnostics, dispersion
from grmkit.analysis.evaluation import EvalReport, bic, count_parameters, r2_mean, rmse
from grmkit.analysis.market_graph import (
    CommunityPartition,
    PartialCorrelationGraph,
    SectorRatioMatrix,
    partial_correlation_matrix,
    ratio_matrix,
    threshold_pca_graph,
)
from grmkit.analysis.walktrap import walktrap

__all__ = [
    "BacktestPeriod",
    "CommunityPartition",
    "EvalReport",
    "PartialCorrelationGraph",
    "SectorRatioMatrix",
    "angle_degrees",
    "annualized_market_vol",
    "beta_diagnostics",
    "bic",
    "count_parameters",
    "dispersion",
    "grm_recipe",
    "partial_correlation_matrix",
    "pca_recipe",
    "r2_mean",
    "ratio_matrix",
    "rmse",
    "rolling_backtest",
    "threshold_pca_graph",
    "walktrap",
]
