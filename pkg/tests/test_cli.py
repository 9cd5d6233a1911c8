"""Tests for the grmkit command line."""

import json

import pandas as pd
import pytest

from grmkit.cli import EXIT_ERROR, EXIT_OK, EXIT_USAGE, build_parser, main


def _write_spec(path, **fields):
    path.write_text(json.dumps(fields))
    return path


def _load(path):
    with open(path) as f:
        return json.load(f)


@pytest.fixture
def chain_market(tmp_path):
    spec = _write_spec(tmp_path / "chain.json", p=6, n=120, structure="chain", seed=7)
    returns = tmp_path / "data" / "returns.csv"
    assert main(["synth", "--spec", str(spec), "--out", str(returns), "-q"]) == EXIT_OK
    return returns


@pytest.fixture
def factor_market(tmp_path):
    spec = _write_spec(tmp_path / "factor.json", p=8, n=160, structure="one_factor", seed=11)
    returns = tmp_path / "factor" / "returns.csv"
    assert main(["synth", "--spec", str(spec), "--out", str(returns), "-q"]) == EXIT_OK
    return returns


def _fit(returns, out, *flags, name="model.json"):
    return main(["fit", "--input", str(returns), "--out", str(out), "--name", name, "-q", *flags])


class TestParser:
    """Tests for build_parser."""

    def test_subcommands(self):
        args = build_parser().parse_args(["fit", "--input", "r.csv", "--lambda", "0.1"])
        assert args.command == "fit"
        assert args.lam == 0.1

    def test_communities_count_flag(self):
        args = build_parser().parse_args(["communities", "--model", "m.json", "--k", "4"])
        assert args.communities == 4

    def test_bad_choice_is_usage_error(self):
        assert main(["fit", "--input", "r.csv", "--method", "lasso"]) == EXIT_USAGE

    def test_no_command(self):
        assert main([]) == EXIT_USAGE


class TestSynth:
    """Tests for the synth command."""

    def test_writes_panel_and_truth(self, chain_market):
        frame = pd.read_csv(chain_market, index_col=0)
        assert list(frame.columns) == ["S001", "S002", "S003", "S004", "S005", "S006"]
        assert len(frame) == 120
        truth = _load(chain_market.with_name("returns_truth.json"))
        assert truth["spec"]["seed"] == 7
        assert len(truth["truth"]["edges"]) == 5

    def test_factor_returns_written(self, factor_market):
        assert factor_market.with_name("returns_factors.csv").exists()

    def test_same_seed_same_bytes(self, tmp_path):
        spec = _write_spec(tmp_path / "s.json", p=4, n=30, structure="banded", width=2)
        a, b = tmp_path / "a" / "r.csv", tmp_path / "b" / "r.csv"
        assert main(["synth", "--spec", str(spec), "--out", str(a), "--seed", "3", "-q"]) == EXIT_OK
        assert main(["synth", "--spec", str(spec), "--out", str(b), "--seed", "3", "-q"]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_field(self, tmp_path):
        spec = _write_spec(tmp_path / "s.json", p=4, n=30, shape="chain")
        assert main(["synth", "--spec", str(spec), "--out", str(tmp_path / "r.csv")]) == EXIT_ERROR

    def test_unknown_structure(self, tmp_path):
        spec = _write_spec(tmp_path / "s.json", p=3, n=5, structure="bogus")
        assert main(["synth", "--spec", str(spec), "--out", str(tmp_path / "r.csv")]) == EXIT_ERROR

    def test_non_integer_size(self, tmp_path):
        spec = _write_spec(tmp_path / "s.json", p="three", n=5)
        assert main(["synth", "--spec", str(spec), "--out", str(tmp_path / "r.csv")]) == EXIT_ERROR


class TestFit:
    """Tests for the fit and decompose commands."""

    def test_fixed_lambda(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--method", "glasso", "--lambda", "0.1") == EXIT_OK
        document = _load(out / "model.json")
        assert document["kind"] == "grm"
        assert document["label"] == "glasso"
        assert document["model"]["precision"]["lambda"] == 0.1
        assert document["config"]["lam"] == 0.1
        assert (out / "model.txt").exists()

    def test_cross_validated(self, chain_market, tmp_path):
        out = tmp_path / "out"
        code = _fit(chain_market, out, "--method", "concord", "--cv", "3", "--threads", "2")
        assert code == EXIT_OK
        cv = _load(out / "model.json")["cross_validation"]
        assert len(cv["cv_errors"]) == len(cv["grid"]) == 20
        assert cv["best_lambda"] in cv["grid"]

    def test_lambda_and_cv_conflict(self, chain_market, tmp_path):
        assert _fit(chain_market, tmp_path, "--lambda", "0.1", "--cv", "3") == EXIT_USAGE

    def test_missing_input(self, tmp_path):
        assert _fit(tmp_path / "absent.csv", tmp_path, "--lambda", "0.1") == EXIT_ERROR

    def test_exogenous_needs_factors(self, chain_market, tmp_path):
        assert _fit(chain_market, tmp_path, "--method", "exogenous") == EXIT_USAGE

    def test_fit_is_deterministic(self, chain_market, tmp_path):
        assert _fit(chain_market, tmp_path / "a", "--lambda", "0.05") == EXIT_OK
        assert _fit(chain_market, tmp_path / "b", "--lambda", "0.05") == EXIT_OK
        a = _load(tmp_path / "a" / "model.json")
        b = _load(tmp_path / "b" / "model.json")
        assert a["model"] == b["model"]

    def test_decompose(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--method", "exact_inverse") == EXIT_OK
        code = main(
            ["decompose", "--model", str(out / "model.json"), "--input", str(chain_market),
             "--out", str(out), "-q"]
        )
        assert code == EXIT_OK
        frame = pd.read_csv(out / "decomposition.csv")
        assert len(frame) == 6
        assert (frame["total"] - frame["endogenous"] - frame["residual"]).abs().max() < 1e-8

    def test_corrupt_model_method(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--lambda", "0.1") == EXIT_OK
        document = _load(out / "model.json")
        document["model"]["precision"]["method"] = "bogus"
        (out / "model.json").write_text(json.dumps(document))
        code = main(
            ["decompose", "--model", str(out / "model.json"), "--input", str(chain_market),
             "--out", str(out), "-q"]
        )
        assert code == EXIT_ERROR


class TestEval:
    """Tests for the eval command."""

    def test_report_sorted_by_label(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--method", "pca", "--k", "2", name="pca.json") == EXIT_OK
        assert _fit(chain_market, out, "--lambda", "0.1", name="grm.json") == EXIT_OK
        code = main(
            ["eval", "--model", str(out / "pca.json"), "--model", str(out / "grm.json"),
             "--input", str(chain_market), "--out", str(out), "-q"]
        )
        assert code == EXIT_OK
        report = pd.read_csv(out / "report.csv")
        assert list(report["model"]) == ["glasso", "pca"]
        assert list(report.columns)[:2] == ["model", "rmse"]

    def test_exogenous_without_factors(self, factor_market, tmp_path):
        out = tmp_path / "out"
        factors = factor_market.with_name("returns_factors.csv")
        code = _fit(factor_market, out, "--method", "exogenous", "--factors", str(factors))
        assert code == EXIT_OK
        code = main(
            ["eval", "--model", str(out / "model.json"), "--input", str(factor_market),
             "--out", str(out), "-q"]
        )
        assert code == EXIT_USAGE


class TestGraphCommands:
    """Tests for the graph and communities commands."""

    def test_graphml(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--lambda", "0.1") == EXIT_OK
        code = main(["graph", "--model", str(out / "model.json"), "--out", str(out), "-q"])
        assert code == EXIT_OK
        assert (out / "graph.graphml").exists()
        assert _load(out / "graph_edges.json")["source"] == "glasso"

    def test_pca_graph_matches_grm_edges(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--lambda", "0.1") == EXIT_OK
        grm_edges = len(_load(out / "model.json")["model"]["precision"]["triplets"])
        code = main(
            ["graph", "--model", str(out / "model.json"), "--input", str(chain_market),
             "--pca-k", "2", "--format", "json", "--name", "pca", "--out", str(out), "-q"]
        )
        assert code == EXIT_OK
        assert len(_load(out / "pca_edges.json")["edges"]) <= grm_edges

    def test_communities(self, chain_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(chain_market, out, "--lambda", "0.05") == EXIT_OK
        code = main(["communities", "--model", str(out / "model.json"), "--k", "2",
                     "--out", str(out), "-q"])
        assert code == EXIT_OK
        labels = pd.read_csv(out / "communities.csv")
        assert list(labels.columns) == ["symbol", "community"]
        assert len(labels) == 6


class TestAnalysisCommands:
    """Tests for the beta and backtest commands."""

    def test_beta(self, factor_market, tmp_path):
        out = tmp_path / "out"
        assert _fit(factor_market, out, "--lambda", "0.05", name="grm.json") == EXIT_OK
        assert _fit(factor_market, out, "--method", "pca", "--k", "1", name="pca.json") == EXIT_OK
        code = main(
            ["beta", "--model", str(out / "grm.json"), "--model", str(out / "pca.json"),
             "--input", str(factor_market), "--out", str(out), "-q"]
        )
        assert code == EXIT_OK
        summary = _load(out / "betas.json")
        assert list(summary["angles_degrees"]) == ["glasso vs pca"]
        assert set(summary["annualized_vol_pct"]) == {"glasso", "pca"}

    def test_backtest(self, chain_market, tmp_path):
        out = tmp_path / "out"
        code = main(
            ["backtest", "--input", str(chain_market), "--window", "40", "--step", "20",
             "--recipe", "pca", "--recipe", "glasso", "--lambda", "0.1", "--k", "2",
             "--out", str(out), "-q"]
        )
        assert code == EXIT_OK
        frame = pd.read_csv(out / "backtest.csv")
        assert len(frame) == 2 * 4
        assert set(frame["recipe"]) == {"pca", "glasso"}

    def test_backtest_needs_lambda_for_grm(self, chain_market, tmp_path):
        code = main(
            ["backtest", "--input", str(chain_market), "--window", "40", "--step", "20",
             "--recipe", "glasso", "--out", str(tmp_path), "-q"]
        )
        assert code == EXIT_USAGE
