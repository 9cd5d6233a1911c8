"""Command handlers behind the grmkit CLI."""

from grmkit.tools.backtest import BacktestTools
from grmkit.tools.beta import BetaTools
from grmkit.tools.evaluate import EvalTools
from grmkit.tools.fit import FitTools
from grmkit.tools.graph import GraphTools
from grmkit.tools.synth import SynthTools
from grmkit.tools.workspace import Workspace

__all__ = [
    "BacktestTools",
    "BetaTools",
    "EvalTools",
    "FitTools",
    "GraphTools",
    "SynthTools",
    "Workspace",
]
