"""Tests for the units module."""

import numpy as np

from grmkit.utils.units import TRADING_DAYS, Annualizer, Frequency


class TestAnnualizer:
    """Tests for Annualizer class."""

    def test_periods_per_year_daily(self):
        assert Annualizer.periods_per_year(Frequency.DAILY) == TRADING_DAYS

    def test_periods_per_year_custom_trading_days(self):
        assert Annualizer.periods_per_year(Frequency.DAILY, trading_days=250) == 250

    def test_periods_per_year_monthly(self):
        assert Annualizer.periods_per_year(Frequency.MONTHLY) == 12

    def test_variance(self):
        assert abs(Annualizer.variance(0.001) - 0.252) < 1e-12

    def test_unit_volatility(self):
        # daily variance 1/252 is one in yearly terms
        assert abs(Annualizer.volatility(1.0 / 252) - 1.0) < 1e-12

    def test_weekly_volatility(self):
        assert abs(Annualizer.volatility(1.0 / 52, Frequency.WEEKLY) - 1.0) < 1e-12

    def test_series_volatility_uses_sample_variance(self):
        a = np.sqrt(1.0 / 504)
        series = np.array([a, -a])  # ddof=1 variance is 2 a^2 = 1/252
        assert abs(Annualizer.series_volatility(series) - 1.0) < 1e-12

    def test_to_percent(self):
        assert Annualizer.to_percent(0.25) == 25.0

    def test_format_percent(self):
        assert Annualizer.format_percent(0.1234) == "12.34%"
        assert Annualizer.format_percent(0.5, digits=0) == "50%"
