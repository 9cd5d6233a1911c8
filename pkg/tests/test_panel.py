"""Tests for the panel module."""

from datetime import date

import numpy as np
import pytest

from grmkit.engine.panel import (
    align,
    center,
    load_distances,
    load_factors,
    load_returns,
    load_sector_map,
    split,
    write_returns,
)
from grmkit.errors import (
    DuplicateSymbolError,
    EmptySplitError,
    IoFailureError,
    MisalignmentError,
    MissingValueError,
    NonMonotoneDatesError,
)
from tests.conftest import make_factors, make_panel


def _write(path, text):
    path.write_text(text)
    return path


class TestLoadReturns:
    """Tests for load_returns."""

    def test_three_column_csv(self, tmp_path):
        path = _write(
            tmp_path / "r.csv",
            "date,AAA,BBB\n"
            "2020-01-02,0.01,-0.02\n"
            "2020-01-03,0.00,0.01\n"
            "2020-01-06,-0.01,0.02\n"
            "2020-01-07,0.02,0.00\n",
        )
        panel = load_returns(path)
        assert panel.p == 2
        assert panel.n == 4
        assert panel.asset_ids == ["AAA", "BBB"]
        assert panel.timestamps[0] == date(2020, 1, 2)
        assert panel.values[1, 0] == pytest.approx(-0.02)
        assert not panel.centered

    def test_duplicate_symbol(self, tmp_path):
        path = _write(
            tmp_path / "r.csv",
            "date,AAA,AAA\n2020-01-02,0.01,0.02\n2020-01-03,0.00,0.01\n",
        )
        with pytest.raises(DuplicateSymbolError):
            load_returns(path)

    def test_blank_cell(self, tmp_path):
        path = _write(
            tmp_path / "r.csv",
            "date,AAA,BBB\n2020-01-02,0.01,\n2020-01-03,0.00,0.01\n",
        )
        with pytest.raises(MissingValueError):
            load_returns(path)

    def test_non_numeric_cell(self, tmp_path):
        path = _write(
            tmp_path / "r.csv",
            "date,AAA,BBB\n2020-01-02,0.01,n/a\n2020-01-03,0.00,0.01\n",
        )
        with pytest.raises(MissingValueError):
            load_returns(path)

    def test_dates_must_increase(self, tmp_path):
        path = _write(
            tmp_path / "r.csv",
            "date,AAA,BBB\n2020-01-03,0.01,0.02\n2020-01-02,0.00,0.01\n",
        )
        with pytest.raises(NonMonotoneDatesError):
            load_returns(path)

    def test_missing_file_names_path(self, tmp_path):
        with pytest.raises(IoFailureError, match="nowhere.csv"):
            load_returns(tmp_path / "nowhere.csv")

    def test_written_panel_reads_back(self, tmp_path, rng):
        panel = make_panel(rng.normal(0, 0.01, (3, 6)), ids=["X", "Y", "Z"])
        loaded = load_returns(write_returns(panel, tmp_path / "out" / "r.csv"))
        assert loaded.asset_ids == panel.asset_ids
        assert loaded.timestamps == panel.timestamps
        np.testing.assert_allclose(loaded.values, panel.values, rtol=1e-11)


class TestAuxiliaryTables:
    """Tests for factor, sector and distance loaders."""

    def test_single_factor_file(self, tmp_path):
        path = _write(tmp_path / "f.csv", "date,MKT\n2020-01-02,0.01\n2020-01-03,-0.01\n")
        factors = load_factors(path)
        assert factors.k == 1
        assert factors.n == 2

    def test_sector_map(self, sector_csv):
        sectors = load_sector_map(sector_csv)
        assert sectors.label_of("A3") == "Energy"
        assert sectors.labels() == ["Energy", "Tech"]
        assert sectors.label_of("ZZZ") is None

    def test_sector_map_bad_header(self, tmp_path):
        path = _write(tmp_path / "s.csv", "ticker,industry\nA,Tech\n")
        with pytest.raises(MissingValueError):
            load_sector_map(path)

    def test_sector_map_duplicate(self, tmp_path):
        path = _write(tmp_path / "s.csv", "symbol,sector\nA,Tech\nA,Energy\n")
        with pytest.raises(DuplicateSymbolError):
            load_sector_map(path)

    def test_distances(self, tmp_path):
        path = _write(tmp_path / "d.csv", "symbol,A,B\nA,0,120\nB,120,0\n")
        dist = load_distances(path)
        assert dist.asset_ids == ["A", "B"]
        assert dist.d[0, 1] == 120.0

    def test_distances_reorder(self, tmp_path):
        path = _write(tmp_path / "d.csv", "symbol,A,B,C\nA,0,1,2\nB,1,0,3\nC,2,3,0\n")
        dist = load_distances(path).reorder(["C", "A", "B"])
        assert dist.d[0, 1] == 2.0
        assert dist.d[0, 2] == 3.0

    def test_distances_labels_must_match(self, tmp_path):
        path = _write(tmp_path / "d.csv", "symbol,A,B\nA,0,1\nC,1,0\n")
        with pytest.raises(MisalignmentError):
            load_distances(path)


class TestCenter:
    """Tests for center."""

    def test_row_mean_removed(self):
        panel = center(make_panel([[1.0, 3.0]]))
        np.testing.assert_allclose(panel.values, [[-1.0, 1.0]])
        assert panel.centered

    def test_centered_panel_unchanged(self):
        once = center(make_panel([[1.0, 3.0]]))
        assert center(once) is once

    def test_zero_mean_row(self):
        panel = center(make_panel([[0.02, 0.0, -0.02]]))
        np.testing.assert_allclose(panel.values, [[0.02, 0.0, -0.02]], atol=1e-15)

    def test_input_not_mutated(self):
        raw = make_panel([[1.0, 3.0]])
        center(raw)
        np.testing.assert_array_equal(raw.values, [[1.0, 3.0]])


class TestSplit:
    """Tests for split."""

    def test_even_split(self, rng):
        panel = make_panel(rng.normal(size=(2, 10)))
        left, right = split(panel, panel.timestamps[4])
        assert (left.n, right.n) == (5, 5)

    def test_crisis_window_sizes(self, rng):
        panel = make_panel(rng.normal(size=(3, 126)))
        left, right = split(panel, panel.timestamps[60])
        assert (left.n, right.n) == (61, 65)

    def test_boundary_before_first_date(self, rng):
        panel = make_panel(rng.normal(size=(2, 10)))
        with pytest.raises(EmptySplitError):
            split(panel, date(1999, 1, 1))


class TestAlign:
    """Tests for align."""

    def test_factor_history_trimmed(self, rng):
        panel = make_panel(rng.normal(size=(2, 5)), start=date(2020, 1, 3))
        factors = make_factors(np.arange(10.0)[None, :], start=date(2020, 1, 1))
        _, aligned = align(panel, factors)
        assert aligned.timestamps == panel.timestamps
        np.testing.assert_array_equal(aligned.values, [[2.0, 3.0, 4.0, 5.0, 6.0]])

    def test_missing_factor_date(self, rng):
        panel = make_panel(rng.normal(size=(2, 5)))
        factors = make_factors(np.zeros((1, 3)))
        with pytest.raises(MisalignmentError):
            align(panel, factors)

    def test_reorder_rows(self):
        panel = make_panel([[1.0, 2.0], [3.0, 4.0]], ids=["A", "B"])
        assert panel.reorder(["B", "A"]).values[0, 0] == 3.0
