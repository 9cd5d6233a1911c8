"""Shared fixtures: random SPD matrices and small panels written to disk."""

from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from grmkit.engine.panel import FactorPanel, ReturnsPanel


def spd(rng: np.random.Generator, p: int) -> np.ndarray:
    M = rng.standard_normal((p, p))
    return M @ M.T + p * np.eye(p)


def dates(n: int, start: date = date(2020, 1, 1)) -> list[date]:
    return [start + timedelta(days=i) for i in range(n)]


def make_panel(
    values, ids: list[str] | None = None, start: date = date(2020, 1, 1)
) -> ReturnsPanel:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    ids = ids or [f"A{i + 1}" for i in range(values.shape[0])]
    return ReturnsPanel(asset_ids=ids, timestamps=dates(values.shape[1], start), values=values)


def make_factors(
    values, names: list[str] | None = None, start: date = date(2020, 1, 1)
) -> FactorPanel:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    names = names or [f"F{i + 1}" for i in range(values.shape[0])]
    return FactorPanel(factor_names=names, timestamps=dates(values.shape[1], start), values=values)


def write_wide_csv(path: Path, panel: ReturnsPanel | FactorPanel) -> Path:
    panel.to_frame().to_csv(path, lineterminator="\n", float_format="%.17g")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20080101)


@pytest.fixture
def example_sigma():
    """Two assets with unit variances and correlation one half."""
    return np.array([[1.0, 0.5], [0.5, 1.0]])


@pytest.fixture
def sector_csv(tmp_path):
    path = tmp_path / "sectors.csv"
    pd.DataFrame(
        {"symbol": ["A1", "A2", "A3", "A4"], "sector": ["Tech", "Tech", "Energy", "Energy"]}
    ).to_csv(path, index=False)
    return path
