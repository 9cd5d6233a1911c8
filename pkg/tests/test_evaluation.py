"""Tests for the evaluation module."""

import json
import math

import numpy as np
import pandas as pd
import pytest

from grmkit.analysis.evaluation import (
    REPORT_COLUMNS,
    ModelDescriptor,
    ModelKind,
    bic,
    count_parameters,
    evaluate,
    r2_mean,
    rmse,
    write_reports,
)
from grmkit.errors import (
    ConstantRowError,
    GrmError,
    ShapeMismatchError,
    UnknownKindError,
    ZeroResidualError,
)
from tests.conftest import make_panel


class TestRmse:
    """Tests for rmse."""

    def test_perfect_prediction(self, rng):
        actual = make_panel(rng.normal(size=(3, 5)))
        assert rmse(actual, actual) == (0.0, 0.0)

    def test_zero_prediction_is_hundred_percent(self, rng):
        actual = make_panel(rng.normal(size=(3, 5)))
        _, pct = rmse(make_panel(np.zeros((3, 5))), actual)
        assert abs(pct - 100.0) < 1e-10

    def test_hand_case(self):
        err, pct = rmse(make_panel(np.zeros((2, 2))), make_panel(np.ones((2, 2))))
        assert abs(err - 1.0) < 1e-10
        assert abs(pct - 100.0) < 1e-10

    def test_rows_aligned_by_symbol(self):
        actual = make_panel([[1.0, 2.0], [3.0, 4.0]], ids=["A", "B"])
        predicted = make_panel([[3.0, 4.0], [1.0, 2.0]], ids=["B", "A"])
        assert rmse(predicted, actual)[0] == 0.0

    def test_column_permutation_invariant(self, rng):
        actual = rng.normal(size=(4, 12))
        predicted = actual + rng.normal(0, 0.3, size=(4, 12))
        order = rng.permutation(12)
        base = rmse(make_panel(predicted), make_panel(actual))
        shuffled = rmse(make_panel(predicted[:, order]), make_panel(actual[:, order]))
        assert shuffled == pytest.approx(base, rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            rmse(make_panel(np.zeros((2, 3))), make_panel(np.ones((2, 2))))

    def test_all_zero_actual(self):
        with pytest.raises(GrmError):
            rmse(make_panel(np.ones((2, 2))), make_panel(np.zeros((2, 2))))


class TestCountParameters:
    """Tests for count_parameters."""

    def test_exogenous(self):
        assert count_parameters(ModelDescriptor("exogenous", p=10, k=3)) == 30

    def test_pca(self):
        assert count_parameters(ModelDescriptor(ModelKind.PCA, p=10, k=3)) == 30

    def test_spatial(self):
        assert count_parameters(ModelDescriptor("spatial", p=10, k=3)) == 31

    def test_dense_grm(self):
        assert count_parameters(ModelDescriptor("grm", p=4, zeros=0)) == 10

    def test_diagonal_grm(self):
        assert count_parameters(ModelDescriptor("grm", p=4, zeros=12)) == 4

    def test_mixed(self):
        assert count_parameters(ModelDescriptor("mixed", p=4, k=2, zeros=12)) == 1 + 8 + 4

    def test_unknown_kind(self):
        with pytest.raises(UnknownKindError):
            count_parameters(ModelDescriptor("arima", p=4))


class TestBic:
    """Tests for bic."""

    def test_hand_case(self):
        value = bic(make_panel([[0.0, 0.0]]), make_panel([[1.0, 1.0]]), 0)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_perfect_prediction(self, rng):
        actual = make_panel(rng.normal(size=(2, 5)))
        with pytest.raises(ZeroResidualError):
            bic(actual, actual, 3)

    def test_kappa_increment(self, rng):
        actual = make_panel(rng.normal(size=(3, 7)))
        predicted = make_panel(rng.normal(size=(3, 7)))
        diff = bic(predicted, actual, 5) - bic(predicted, actual, 4)
        assert abs(diff - math.log(7)) < 1e-10


class TestR2Mean:
    """Tests for r2_mean."""

    def test_perfect_prediction(self, rng):
        actual = make_panel(rng.normal(size=(3, 6)))
        assert r2_mean(actual, actual) == 1.0

    def test_row_means_score_zero(self, rng):
        values = rng.normal(size=(3, 6))
        means = np.repeat(values.mean(axis=1, keepdims=True), 6, axis=1)
        assert abs(r2_mean(make_panel(means), make_panel(values))) < 1e-10

    def test_hand_case(self):
        assert abs(r2_mean(make_panel([[1.0, 1.0]]), make_panel([[0.0, 2.0]]))) < 1e-10

    def test_constant_row(self):
        with pytest.raises(ConstantRowError):
            r2_mean(make_panel([[0.0, 1.0], [0.0, 0.0]]), make_panel([[1.0, 2.0], [3.0, 3.0]]))


class TestReports:
    """Tests for evaluate and write_reports."""

    def test_evaluate_fields(self, rng):
        actual = make_panel(rng.normal(size=(3, 10)))
        predicted = make_panel(rng.normal(size=(3, 10)))
        report = evaluate("grm", predicted, actual, kappa=6)
        assert report.p == 3
        assert report.n_O == 10
        assert report.kappa == 6
        assert all(np.isfinite([report.rmse, report.rmse_pct, report.bic, report.r2_mean]))

    def test_csv_sorted_by_label(self, tmp_path, rng):
        actual = make_panel(rng.normal(size=(2, 8)))
        reports = [
            evaluate(label, make_panel(rng.normal(size=(2, 8))), actual, 1)
            for label in ("pca", "glasso")
        ]
        csv_path, json_path = write_reports(
            reports, tmp_path / "report.csv", tmp_path / "report.json"
        )
        frame = pd.read_csv(csv_path)
        assert list(frame.columns) == REPORT_COLUMNS
        assert list(frame["model"]) == ["glasso", "pca"]
        with open(json_path) as f:
            assert [r["model_label"] for r in json.load(f)] == ["glasso", "pca"]
