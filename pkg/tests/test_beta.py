"""Tests for the beta analytics."""

import math

import numpy as np
import pytest

from grmkit.analysis.beta import (
    VolKind,
    angle_degrees,
    annualized_market_vol,
    beta_diagnostics,
    diagnose,
    dispersion,
)
from grmkit.engine.factors import BetaVector
from grmkit.errors import DimensionMismatchError, ZeroBetaError, ZeroMeanError, ZeroVectorError
from grmkit.utils.units import Annualizer
from tests.conftest import make_factors, make_panel


def _beta(values, ids=None) -> BetaVector:
    values = np.asarray(values, dtype=float)
    return BetaVector(asset_ids=ids or [f"A{i + 1}" for i in range(len(values))], values=values)


class TestAngle:
    """Tests for angle_degrees."""

    def test_same_vector(self):
        b = _beta([1.0, 2.0, 3.0])
        assert angle_degrees(b, _beta([1.0, 2.0, 3.0])) == pytest.approx(0.0, abs=1e-6)

    def test_orthogonal(self):
        assert angle_degrees(_beta([1.0, 0.0]), _beta([0.0, 1.0])) == pytest.approx(90.0)

    def test_forty_five_degrees(self):
        b = _beta([1.0 / math.sqrt(2), 1.0 / math.sqrt(2)])
        assert angle_degrees(_beta([1.0, 0.0]), b) == pytest.approx(45.0)

    def test_aligned_by_symbol(self):
        a = _beta([1.0, 0.0], ids=["X", "Y"])
        b = _beta([0.0, 1.0], ids=["Y", "X"])
        assert angle_degrees(a, b) == pytest.approx(0.0, abs=1e-6)

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            angle_degrees(_beta([0.0, 0.0]), _beta([1.0, 0.0]))

    def test_different_assets(self):
        with pytest.raises(DimensionMismatchError):
            angle_degrees(_beta([1.0, 0.0], ids=["X", "Y"]), _beta([1.0, 0.0], ids=["X", "Z"]))


class TestDispersion:
    """Tests for dispersion."""

    def test_all_ones(self):
        assert dispersion(_beta(np.ones(5))) == 0.0

    def test_two_entries(self):
        assert dispersion(_beta([0.0, 2.0])) == pytest.approx(1.0)

    def test_four_entries(self):
        assert dispersion(_beta([2.0, 0.0, 1.0, 1.0])) == pytest.approx(math.sqrt(0.5))

    def test_zero_mean(self):
        with pytest.raises(ZeroMeanError):
            dispersion(_beta([1.0, -1.0]))


class TestMarketVolatility:
    """Tests for annualized_market_vol."""

    def test_first_factor_unit_volatility(self):
        a = math.sqrt(1.0 / 504)
        factors = make_factors([[a, -a], [5.0, 1.0]])
        vol = annualized_market_vol(VolKind.EXOGENOUS_FIRST_FACTOR, factors=factors)
        assert vol == pytest.approx(100.0)

    def test_one_hot_beta_picks_asset(self, rng):
        panel = make_panel(rng.normal(0, 0.01, size=(3, 50)))
        vol = annualized_market_vol(VolKind.PROJECTED, beta=_beta([0.0, 1.0, 0.0]), panel=panel)
        expected = Annualizer.to_percent(Annualizer.series_volatility(panel.values[1]))
        assert vol == pytest.approx(expected)

    def test_projection_recovers_factor(self, rng):
        beta = rng.uniform(0.5, 1.5, 6)
        f = rng.normal(0, 0.01, 80)
        panel = make_panel(np.outer(beta, f))
        vol = annualized_market_vol(VolKind.PROJECTED, beta=_beta(beta), panel=panel)
        assert vol == pytest.approx(Annualizer.to_percent(Annualizer.series_volatility(f)))

    def test_projection_under_rescaled_beta(self, rng):
        panel = make_panel(rng.normal(0, 0.01, size=(5, 60)))
        beta = rng.uniform(0.5, 1.5, 5)
        base = annualized_market_vol(VolKind.PROJECTED, beta=_beta(beta), panel=panel)
        flipped = annualized_market_vol(VolKind.PROJECTED, beta=_beta(-beta), panel=panel)
        assert flipped == pytest.approx(base, rel=1e-12)
        for c in (0.01, 3.0, -7.5):
            vol = annualized_market_vol(VolKind.PROJECTED, beta=_beta(c * beta), panel=panel)
            assert vol == pytest.approx(base / abs(c), rel=1e-10)

    def test_zero_beta(self, rng):
        with pytest.raises(ZeroBetaError):
            annualized_market_vol(
                VolKind.PROJECTED, beta=_beta([0.0, 0.0]), panel=make_panel(rng.normal(size=(2, 5)))
            )

    def test_missing_factors(self):
        with pytest.raises(DimensionMismatchError):
            annualized_market_vol("exogenous_first_factor")


class TestDiagnostics:
    """Tests for beta_diagnostics and diagnose."""

    def test_all_ones(self):
        assert beta_diagnostics(_beta(np.ones(4))) == (1.0, 1.0)

    def test_mixed_signs(self):
        assert beta_diagnostics(_beta([-1.0, 3.0])) == (0.5, 0.0)

    def test_custom_band(self):
        assert beta_diagnostics(_beta([0.8, 1.2]), band=(0.9, 1.1)) == (1.0, 0.0)

    def test_unit_length_beta_is_rescaled(self):
        raw = np.array([0.4, 0.6, 1.0, 2.0])
        unit = _beta(raw / np.linalg.norm(raw))
        assert beta_diagnostics(unit) == beta_diagnostics(_beta(raw / raw.mean()))
        assert beta_diagnostics(unit) == (1.0, 0.5)

    def test_mean_zero_beta(self):
        with pytest.raises(ZeroMeanError):
            beta_diagnostics(_beta([1.0, -1.0]))

    def test_diagnose(self):
        d = diagnose(_beta([0.0, 2.0]))
        assert d.fraction_positive == 0.5
        assert d.dispersion == pytest.approx(1.0)
        assert d.to_dict()["band"] == [0.5, 1.5]
