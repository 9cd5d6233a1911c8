"""grmkit command-line entry point.

Exit codes: 0 on success, 1 on a data or computation error, 2 on misuse.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from grmkit import __version__
from grmkit.config import RunConfig, load_config
from grmkit.errors import GrmError, UsageError
from grmkit.tools.backtest import BacktestTools
from grmkit.tools.beta import BetaTools
from grmkit.tools.evaluate import EvalTools
from grmkit.tools.fit import FitTools
from grmkit.tools.graph import GraphTools
from grmkit.tools.synth import SynthTools
from grmkit.tools.workspace import Workspace

logger = logging.getLogger("grmkit")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

# argparse dest -> RunConfig field
_CONFIG_FLAGS = {
    "method": "method",
    "lam": "lam",
    "cv": "cv_folds",
    "frobenius_weight": "frobenius_weight",
    "tol": "tol",
    "max_iter": "max_iter",
    "divisor": "divisor",
    "k": "k",
    "seed": "seed",
    "threads": "threads",
    "trading_days": "trading_days",
    "walk_length": "walk_length",
    "communities": "communities",
    "out": "output_dir",
}


class GrmkitCli:
    """Routes a parsed command to its tool handler."""

    def __init__(self, config: RunConfig):
        self.workspace = Workspace(config)
        self.fit_tools = FitTools(self.workspace)
        self.eval_tools = EvalTools(self.workspace)
        self.graph_tools = GraphTools(self.workspace)
        self.beta_tools = BetaTools(self.workspace)
        self.backtest_tools = BacktestTools(self.workspace)
        self.synth_tools = SynthTools(self.workspace)

    def handle(self, command: str, args: argparse.Namespace) -> dict[str, Any]:
        logger.debug("Command %s with %s", command, vars(args))
        if command == "fit":
            return self.fit_tools.fit(
                args.input, args.method, args.factors, args.distances, args.name
            )
        elif command == "decompose":
            return self.fit_tools.decompose(args.model, args.input, args.name)
        elif command == "eval":
            return self.eval_tools.evaluate(args.model or [], args.input, args.factors, args.name)
        elif command == "graph":
            return self.graph_tools.graph(
                args.model, args.format, args.sectors, args.input, args.pca_k,
                args.target_edges, args.name,
            )
        elif command == "communities":
            return self.graph_tools.communities(
                args.model, args.communities, args.walk_length, args.sectors, args.name
            )
        elif command == "beta":
            return self.beta_tools.beta(args.model or [], args.input, args.factors, args.name)
        elif command == "backtest":
            return self.backtest_tools.backtest(
                args.input, args.window, args.step, args.recipe, args.name
            )
        elif command == "synth":
            return self.synth_tools.synth(args.spec, args.out_file, args.seed)
        raise UsageError(f"Unknown command: {command}")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument(
        "--threads", type=int, help="Worker threads (default: $GRMKIT_THREADS or all cores)"
    )
    common.add_argument("--seed", type=int, help="Random seed")
    common.add_argument("--json", action="store_true", help="Print the command result as JSON")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    return common


def _solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lam", type=float, help="Penalty")
    parser.add_argument("--cv", type=int, help="Choose the penalty by K-fold cross-validation")
    parser.add_argument("--frobenius-weight", type=float, help="CONCORD ridge weight")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--max-iter", type=int)
    parser.add_argument("--divisor", choices=["n", "n_minus_1"])


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="grmkit", description="Graphical representation models of asset returns"
    )
    parser.add_argument("--version", action="version", version=f"grmkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", parents=[common], help="Fit a model")
    fit.add_argument("--input", type=Path, required=True, help="Returns CSV")
    fit.add_argument(
        "--method",
        choices=["glasso", "concord", "exact_inverse", "pca", "exogenous", "spatial", "mixed"],
    )
    _solver_flags(fit)
    fit.add_argument("--k", type=int, help="Principal components")
    fit.add_argument("--factors", type=Path)
    fit.add_argument("--distances", type=Path)
    fit.add_argument("--out", type=Path, help="Output directory")
    fit.add_argument("--name", default="model.json")

    dec = sub.add_parser("decompose", parents=[common], help="Variance decomposition of a GRM")
    dec.add_argument("--model", type=Path, required=True)
    dec.add_argument("--input", type=Path, required=True)
    dec.add_argument("--divisor", choices=["n", "n_minus_1"])
    dec.add_argument("--out", type=Path)
    dec.add_argument("--name", default="decomposition.csv")

    ev = sub.add_parser("eval", parents=[common], help="Out-of-sample evaluation")
    ev.add_argument("--model", type=Path, action="append", help="Model file (repeatable)")
    ev.add_argument("--input", type=Path, required=True, help="Out-of-sample returns CSV")
    ev.add_argument("--factors", type=Path)
    ev.add_argument("--out", type=Path)
    ev.add_argument("--name", default="report.csv")

    gr = sub.add_parser("graph", parents=[common], help="Export a partial-correlation graph")
    gr.add_argument("--model", type=Path)
    gr.add_argument("--format", choices=["graphml", "dot", "json"], default="graphml")
    gr.add_argument("--sectors", type=Path)
    gr.add_argument("--input", type=Path, help="Returns CSV for the PCA graph")
    gr.add_argument("--pca-k", type=int, help="Build the thresholded PCA graph with k components")
    gr.add_argument("--target-edges", type=int)
    gr.add_argument("--divisor", choices=["n", "n_minus_1"])
    gr.add_argument("--out", type=Path)
    gr.add_argument("--name", default="graph")

    com = sub.add_parser("communities", parents=[common], help="Random-walk communities")
    com.add_argument("--model", type=Path, required=True)
    com.add_argument("--k", dest="communities", type=int, help="Number of communities (default 11)")
    com.add_argument("--walk-length", type=int, help="Random-walk length (default 4)")
    com.add_argument("--sectors", type=Path)
    com.add_argument("--out", type=Path)
    com.add_argument("--name", default="communities")

    beta = sub.add_parser("beta", parents=[common], help="Compare market betas")
    beta.add_argument("--model", type=Path, action="append", help="Model file (repeatable)")
    beta.add_argument("--input", type=Path, required=True, help="In-sample returns CSV")
    beta.add_argument("--factors", type=Path)
    beta.add_argument("--trading-days", type=int)
    beta.add_argument("--out", type=Path)
    beta.add_argument("--name", default="betas")

    bt = sub.add_parser("backtest", parents=[common], help="Rolling out-of-sample R^2")
    bt.add_argument("--input", type=Path, required=True)
    bt.add_argument("--window", type=int, required=True)
    bt.add_argument("--step", type=int, required=True)
    bt.add_argument("--recipe", action="append", choices=["glasso", "concord", "pca"])
    _solver_flags(bt)
    bt.add_argument("--k", type=int, help="Principal components of the pca recipe")
    bt.add_argument("--out", type=Path)
    bt.add_argument("--name", default="backtest")

    syn = sub.add_parser("synth", parents=[common], help="Sample a synthetic market")
    syn.add_argument("--spec", type=Path, required=True, help="SyntheticSpec JSON")
    syn.add_argument("--out", dest="out_file", type=Path, default=Path("returns.csv"))
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values = vars(args)
    overrides = {field: values.get(dest) for dest, field in _CONFIG_FLAGS.items()}
    if overrides.get("output_dir") is not None:
        overrides["output_dir"] = str(overrides["output_dir"])
    if args.command == "synth":
        out_file = Path(args.out_file)
        if out_file.is_absolute() or out_file.parent != Path("."):
            overrides["output_dir"] = str(out_file.parent)
            args.out_file = Path(out_file.name)
        else:
            overrides["output_dir"] = "."
    return overrides


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True
    )


def main(argv: list[str] | None = None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    configure_logging(args.verbose, args.quiet)

    code = EXIT_OK
    try:
        config = load_config(args.config, _overrides(args))
        result = GrmkitCli(config).handle(args.command, args)
    except UsageError as e:
        logger.error("%s", e)
        result, code = {"error": str(e)}, EXIT_USAGE
    except (GrmError, OSError) as e:
        logger.error("%s", e)
        result, code = {"error": str(e)}, EXIT_ERROR

    if args.json:
        print(json.dumps(result, indent=2, default=str))
    elif code == EXIT_OK:
        for path in result.get("outputs", []):
            print(path)
    return code


if __name__ == "__main__":
    sys.exit(main())
