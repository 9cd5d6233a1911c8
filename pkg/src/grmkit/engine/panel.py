"""Return panels and the auxiliary tables that travel with them."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import pandas as pd

from grmkit.errors import (
    DuplicateSymbolError,
    EmptySplitError,
    IoFailureError,
    MisalignmentError,
    MissingValueError,
)
from grmkit.utils.validation import PanelValidator

logger = logging.getLogger(__name__)


class PanelKind(str, Enum):
    """Whether a panel holds observed returns or model predictions."""

    OBSERVED = "observed"
    PREDICTED = "predicted"


class PanelFormat(str, Enum):
    """Supported ingestion layouts."""

    WIDE_CSV = "wide_csv"


@dataclass(frozen=True, eq=False)
class ReturnsPanel:
    """p assets by n observations of simple returns."""

    asset_ids: list[str]
    timestamps: list[date]
    values: np.ndarray
    centered: bool = False
    kind: PanelKind = PanelKind.OBSERVED

    @property
    def p(self) -> int:
        return len(self.asset_ids)

    @property
    def n(self) -> int:
        return len(self.timestamps)

    def columns(self, index: np.ndarray | slice) -> ReturnsPanel:
        """Sub-panel over a selection of observations (never marked centered)."""
        cols = np.arange(self.n)[index]
        return replace(
            self,
            timestamps=[self.timestamps[c] for c in cols],
            values=self.values[:, cols],
            centered=False,
        )

    def reorder(self, asset_ids: list[str]) -> ReturnsPanel:
        """Rows permuted to the given symbol order."""
        if sorted(asset_ids) != sorted(self.asset_ids):
            raise MisalignmentError("Asset sets differ")
        pos = {sym: i for i, sym in enumerate(self.asset_ids)}
        rows = [pos[sym] for sym in asset_ids]
        return replace(self, asset_ids=list(asset_ids), values=self.values[rows])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.values.T,
            index=pd.Index([d.isoformat() for d in self.timestamps], name="date"),
            columns=self.asset_ids,
        )
        return frame

    def summary(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "n": self.n,
            "first": self.timestamps[0].isoformat() if self.timestamps else None,
            "last": self.timestamps[-1].isoformat() if self.timestamps else None,
            "centered": self.centered,
            "kind": self.kind.value,
        }


@dataclass(frozen=True, eq=False)
class FactorPanel:
    """k factors by n observations of factor returns."""

    factor_names: list[str]
    timestamps: list[date]
    values: np.ndarray
    centered: bool = False

    @property
    def k(self) -> int:
        return len(self.factor_names)

    @property
    def n(self) -> int:
        return len(self.timestamps)

    def columns(self, index: np.ndarray | slice) -> FactorPanel:
        cols = np.arange(self.n)[index]
        return replace(
            self,
            timestamps=[self.timestamps[c] for c in cols],
            values=self.values[:, cols],
            centered=False,
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            self.values.T,
            index=pd.Index([d.isoformat() for d in self.timestamps], name="date"),
            columns=self.factor_names,
        )


@dataclass
class SectorMap:
    """Symbol to sector label."""

    entries: dict[str, str] = field(default_factory=dict)

    def labels(self) -> list[str]:
        return sorted(set(self.entries.values()))

    def label_of(self, symbol: str) -> str | None:
        return self.entries.get(symbol)

    def to_dict(self) -> dict[str, str]:
        return dict(sorted(self.entries.items()))


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Pairwise distances (miles) between asset headquarters."""

    asset_ids: list[str]
    d: np.ndarray

    def reorder(self, asset_ids: list[str]) -> DistanceMatrix:
        if sorted(asset_ids) != sorted(self.asset_ids):
            raise MisalignmentError("Distance matrix and panel cover different assets")
        pos = {sym: i for i, sym in enumerate(self.asset_ids)}
        idx = [pos[sym] for sym in asset_ids]
        return DistanceMatrix(asset_ids=list(asset_ids), d=self.d[np.ix_(idx, idx)])


PanelT = TypeVar("PanelT", ReturnsPanel, FactorPanel)


def _open_error(path: Path, exc: Exception) -> IoFailureError:
    return IoFailureError(f"Cannot read {path}: {exc}")


def _read_wide_csv(
    path: str | Path, min_rows: int
) -> tuple[list[str], list[date], np.ndarray]:
    """Parse ``date,COL1,COL2,...`` into (columns, dates, k x n values)."""
    path = Path(path)
    if not path.is_file():
        raise IoFailureError(f"File not found: {path}")

    try:
        header = pd.read_csv(path, header=None, nrows=1, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _open_error(path, e) from e
    columns = [str(c).strip() for c in header.iloc[0].tolist()[1:]]

    validator = PanelValidator()
    validator.raise_for_errors(validator.validate_symbols(columns), str(path))

    try:
        body = pd.read_csv(
            path,
            header=None,
            skiprows=1,
            dtype=str,
            keep_default_na=False,
            names=list(range(len(columns) + 1)),
        )
    except pd.errors.EmptyDataError:
        body = pd.DataFrame(columns=list(range(len(columns) + 1)), dtype=str)
    except (OSError, pd.errors.ParserError) as e:
        raise _open_error(path, e) from e

    raw_dates = body[0].fillna("").astype(str).str.strip()
    parsed = pd.to_datetime(raw_dates, format="ISO8601", errors="coerce")
    bad = parsed.isna().to_numpy()
    if bad.any():
        row = int(np.argmax(bad)) + 2
        raise MissingValueError(f"{path}: unparseable date at line {row}")
    dates = [ts.date() for ts in parsed]

    cells = body.iloc[:, 1:].apply(
        lambda col: pd.to_numeric(col.fillna("").astype(str).str.strip(), errors="coerce")
    )
    values = cells.to_numpy(dtype=float).T

    issues = validator.validate_dates(dates)
    issues += validator.validate_values(values, columns, min_rows=min_rows)
    validator.raise_for_errors(issues, str(path))
    return columns, dates, values


def load_returns(
    path: str | Path, format: PanelFormat | str = PanelFormat.WIDE_CSV
) -> ReturnsPanel:
    """Load a wide CSV of returns (one row per date, one column per asset)."""
    try:
        PanelFormat(format)
    except ValueError as e:
        raise IoFailureError(f"Unsupported format: {format}") from e
    symbols, dates, values = _read_wide_csv(path, min_rows=PanelValidator.MIN_ASSETS)
    logger.info("Loaded %d assets x %d observations from %s", len(symbols), len(dates), path)
    return ReturnsPanel(asset_ids=symbols, timestamps=dates, values=values)


def load_factors(path: str | Path) -> FactorPanel:
    """Load a wide CSV of factor returns."""
    names, dates, values = _read_wide_csv(path, min_rows=1)
    logger.info("Loaded %d factors x %d observations from %s", len(names), len(dates), path)
    return FactorPanel(factor_names=names, timestamps=dates, values=values)


def load_sector_map(path: str | Path) -> SectorMap:
    """Load a ``symbol,sector`` CSV."""
    path = Path(path)
    if not path.is_file():
        raise IoFailureError(f"File not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _open_error(path, e) from e
    if list(frame.columns[:2]) != ["symbol", "sector"]:
        raise MissingValueError(f"{path}: expected header 'symbol,sector'")

    entries: dict[str, str] = {}
    for line, (sym, sector) in enumerate(zip(frame["symbol"], frame["sector"]), start=2):
        sym, sector = sym.strip(), sector.strip()
        if not sym or not sector:
            raise MissingValueError(f"{path}: blank cell at line {line}")
        if sym in entries:
            raise DuplicateSymbolError(f"{path}: symbol '{sym}' listed twice")
        entries[sym] = sector
    return SectorMap(entries=entries)


def load_distances(path: str | Path) -> DistanceMatrix:
    """Load a square distance table whose first column and header both list symbols."""
    path = Path(path)
    if not path.is_file():
        raise IoFailureError(f"File not found: {path}")
    try:
        frame = pd.read_csv(path, index_col=0, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _open_error(path, e) from e

    rows = [str(s).strip() for s in frame.index]
    cols = [str(s).strip() for s in frame.columns]
    validator = PanelValidator()
    validator.raise_for_errors(validator.validate_symbols(rows), str(path))
    if rows != cols:
        raise MisalignmentError(f"{path}: row and column symbols differ")

    d = frame.apply(
        lambda col: pd.to_numeric(col.astype(str).str.strip(), errors="coerce")
    ).to_numpy(dtype=float)
    validator.raise_for_errors(validator.validate_distances(d, rows), str(path))
    return DistanceMatrix(asset_ids=rows, d=d)


def center(panel: PanelT) -> PanelT:
    """Subtract each row's mean; a centered panel is returned unchanged."""
    if panel.centered:
        return panel
    means = panel.values.mean(axis=1, keepdims=True)
    values = panel.values - means
    return replace(panel, values=values, centered=True)


def split(panel: ReturnsPanel, boundary: date) -> tuple[ReturnsPanel, ReturnsPanel]:
    """In-sample (timestamps <= boundary) and out-of-sample halves."""
    stamps = np.array([d.toordinal() for d in panel.timestamps])
    left = stamps <= boundary.toordinal()
    n_in, n_out = int(left.sum()), int((~left).sum())
    if n_in < 2 or n_out < 2:
        raise EmptySplitError(
            f"Split at {boundary.isoformat()} leaves {n_in} in-sample and "
            f"{n_out} out-of-sample observations"
        )
    return panel.columns(np.flatnonzero(left)), panel.columns(np.flatnonzero(~left))


def align(panel: ReturnsPanel, factors: FactorPanel) -> tuple[ReturnsPanel, FactorPanel]:
    """Restrict factors to the panel's timestamps.

    Factor files often span a longer history than the return panel; every
    panel date must still be present in the factor file.
    """
    pos = {d: i for i, d in enumerate(factors.timestamps)}
    missing = [d for d in panel.timestamps if d not in pos]
    if missing:
        raise MisalignmentError(
            f"{len(missing)} panel dates have no factor returns (first: {missing[0].isoformat()})"
        )
    if factors.timestamps == panel.timestamps:
        return panel, factors
    cols = np.array([pos[d] for d in panel.timestamps])
    return panel, factors.columns(cols)


def write_returns(panel: ReturnsPanel | FactorPanel, path: str | Path) -> Path:
    """Write a panel in the same wide layout :func:`load_returns` and :func:`load_factors` read."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        panel.to_frame().to_csv(path, lineterminator="\n")
    except OSError as e:
        raise IoFailureError(f"Cannot write {path}: {e}") from e
    return path
