"""Return-frequency conversions."""

from enum import Enum
from typing import TypeAlias

import numpy as np

Number: TypeAlias = int | float

TRADING_DAYS = 252


class Frequency(str, Enum):
    """Sampling frequency of a return series."""

    DAILY = "daily"
    WEEKLY = "weekly"
    MONTHLY = "monthly"
    ANNUAL = "annual"


# Observations per year
_PERIODS_PER_YEAR: dict[Frequency, float] = {
    Frequency.DAILY: TRADING_DAYS,
    Frequency.WEEKLY: 52,
    Frequency.MONTHLY: 12,
    Frequency.ANNUAL: 1,
}


class Annualizer:
    """Scale per-period variances and volatilities to yearly figures."""

    @staticmethod
    def periods_per_year(frequency: Frequency, trading_days: Number = TRADING_DAYS) -> float:
        if frequency is Frequency.DAILY:
            return float(trading_days)
        return float(_PERIODS_PER_YEAR[frequency])

    @staticmethod
    def variance(
        value: Number, frequency: Frequency = Frequency.DAILY, trading_days: Number = TRADING_DAYS
    ) -> float:
        return float(value) * Annualizer.periods_per_year(frequency, trading_days)

    @staticmethod
    def volatility(
        variance: Number,
        frequency: Frequency = Frequency.DAILY,
        trading_days: Number = TRADING_DAYS,
    ) -> float:
        """sqrt(per-period variance * periods per year)."""
        return float(np.sqrt(Annualizer.variance(variance, frequency, trading_days)))

    @staticmethod
    def series_volatility(
        series: np.ndarray,
        frequency: Frequency = Frequency.DAILY,
        trading_days: Number = TRADING_DAYS,
    ) -> float:
        """Annualized volatility of a series, from its sample variance (divisor n - 1)."""
        var = float(np.var(np.asarray(series, dtype=float), ddof=1))
        return Annualizer.volatility(var, frequency, trading_days)

    @staticmethod
    def to_percent(value: Number) -> float:
        return float(value) * 100.0

    @staticmethod
    def format_percent(value: Number, digits: int = 2) -> str:
        """Format a fraction as a percentage, e.g. 0.1234 -> '12.34%'."""
        return f"{float(value) * 100:.{digits}f}%"
