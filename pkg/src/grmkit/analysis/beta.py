"""Comparisons between beta vectors of different models."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from grmkit.engine.factors import BetaVector, Normalization, normalize
from grmkit.engine.panel import FactorPanel, ReturnsPanel
from grmkit.errors import DimensionMismatchError, ZeroBetaError, ZeroMeanError, ZeroVectorError
from grmkit.utils.units import TRADING_DAYS, Annualizer

logger = logging.getLogger(__name__)

DEFAULT_BAND = (0.5, 1.5)
ZERO_MEAN_TOL = 1e-12


class VolKind(str, Enum):
    EXOGENOUS_FIRST_FACTOR = "exogenous_first_factor"
    PROJECTED = "projected"


@dataclass
class BetaDiagnostics:
    source: str
    fraction_positive: float
    fraction_within_band: float
    band: tuple[float, float]
    dispersion: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "fraction_positive": self.fraction_positive,
            "fraction_within_band": self.fraction_within_band,
            "band": list(self.band),
            "dispersion": self.dispersion,
        }


def _aligned(a: BetaVector, b: BetaVector) -> tuple[np.ndarray, np.ndarray]:
    if a.asset_ids == b.asset_ids:
        return a.values, b.values
    if sorted(a.asset_ids) != sorted(b.asset_ids):
        raise DimensionMismatchError("Beta vectors cover different assets")
    pos = {sym: i for i, sym in enumerate(b.asset_ids)}
    return a.values, b.values[[pos[sym] for sym in a.asset_ids]]


def angle_degrees(a: BetaVector, b: BetaVector) -> float:
    """Angle between two beta vectors, in [0, 180]."""
    x, y = _aligned(a, b)
    nx_, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx_ == 0.0 or ny == 0.0:
        raise ZeroVectorError("Angle with a zero beta vector is undefined")
    cos = float(np.clip(x @ y / (nx_ * ny), -1.0, 1.0))
    return float(np.degrees(np.arccos(cos)))


def dispersion(b: BetaVector) -> float:
    """sqrt(mean((b_i / mean(b) - 1)^2))."""
    values = np.asarray(b.values, dtype=float)
    mean = values.mean()
    if abs(mean) < ZERO_MEAN_TOL:
        raise ZeroMeanError("Dispersion of a mean-zero beta vector is undefined")
    return float(np.sqrt(np.mean((values / mean - 1.0) ** 2)))


def annualized_market_vol(
    kind: VolKind | str,
    *,
    factors: FactorPanel | None = None,
    beta: BetaVector | None = None,
    panel: ReturnsPanel | None = None,
    trading_days: int = TRADING_DAYS,
) -> float:
    """Yearly volatility of a model's market return, in percent.

    ``exogenous_first_factor`` uses the first factor row. ``projected`` uses
    ``beta' Y / (beta' beta)``; flipping the sign of beta leaves the result unchanged
    and scaling beta by ``c`` divides it by ``|c|``.
    """
    kind = VolKind(kind)
    if kind is VolKind.EXOGENOUS_FIRST_FACTOR:
        if factors is None:
            raise DimensionMismatchError("exogenous_first_factor volatility needs factor returns")
        series = factors.values[0]
    else:
        if beta is None or panel is None:
            raise DimensionMismatchError("projected volatility needs a beta vector and returns")
        if sorted(beta.asset_ids) != sorted(panel.asset_ids):
            raise DimensionMismatchError("Beta vector and panel cover different assets")
        if panel.asset_ids != beta.asset_ids:
            panel = panel.reorder(beta.asset_ids)
        b = np.asarray(beta.values, dtype=float)
        norm2 = float(b @ b)
        if norm2 == 0.0:
            raise ZeroBetaError("Cannot project returns on a zero beta vector")
        series = b @ panel.values / norm2
    return Annualizer.to_percent(Annualizer.series_volatility(series, trading_days=trading_days))


def beta_diagnostics(
    b: BetaVector, band: tuple[float, float] = DEFAULT_BAND
) -> tuple[float, float]:
    """Share of positive betas and share inside ``band``, after scaling to mean one."""
    values = normalize(b.values, Normalization.MEAN_ONE)
    lo, hi = band
    positive = float(np.mean(values > 0.0))
    within = float(np.mean((values >= lo) & (values <= hi)))
    return positive, within


def diagnose(b: BetaVector, band: tuple[float, float] = DEFAULT_BAND) -> BetaDiagnostics:
    """:func:`beta_diagnostics` plus dispersion, as one serializable block."""
    positive, within = beta_diagnostics(b, band)
    return BetaDiagnostics(
        source=b.source,
        fraction_positive=positive,
        fraction_within_band=within,
        band=band,
        dispersion=dispersion(b),
    )
