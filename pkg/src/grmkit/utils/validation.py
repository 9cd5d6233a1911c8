"""Input validation for return panels and auxiliary tables."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import date
from enum import Enum

import numpy as np

from grmkit.errors import (
    DuplicateSymbolError,
    GrmError,
    MisalignmentError,
    MissingValueError,
    NonMonotoneDatesError,
    ZeroDistanceError,
)

logger = logging.getLogger(__name__)


class Severity(str, Enum):
    """Validation issue severity levels."""

    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass
class ValidationIssue:
    """A validation issue found in an input table."""

    severity: Severity
    message: str
    symbol: str | None = None
    location: str | None = None
    error: type[GrmError] | None = None

    def __str__(self) -> str:
        prefix = f"[{self.severity.value.upper()}]"
        if self.symbol:
            prefix += f" Symbol '{self.symbol}'"
        if self.location:
            prefix += f" at {self.location}"
        return f"{prefix}: {self.message}"


class PanelValidator:
    """Checks raw tables before they become panels."""

    # Simple returns above this magnitude usually mean the file holds percents
    MAX_PLAUSIBLE_RETURN = 1.0
    MIN_ASSETS = 2
    MIN_OBSERVATIONS = 2

    def validate_symbols(self, symbols: Sequence[str]) -> list[ValidationIssue]:
        """Flag duplicated or blank column headers."""
        issues: list[ValidationIssue] = []
        seen: set[str] = set()
        for sym in symbols:
            if not sym.strip():
                issues.append(
                    ValidationIssue(
                        severity=Severity.ERROR,
                        message="Blank symbol in header",
                        error=MissingValueError,
                    )
                )
            elif sym in seen:
                issues.append(
                    ValidationIssue(
                        severity=Severity.ERROR,
                        message=f"Duplicate symbol: '{sym}'",
                        symbol=sym,
                        error=DuplicateSymbolError,
                    )
                )
            seen.add(sym)
        return issues

    def validate_dates(self, dates: Sequence[date]) -> list[ValidationIssue]:
        """Timestamps must be strictly increasing."""
        issues: list[ValidationIssue] = []
        for i in range(1, len(dates)):
            if dates[i] <= dates[i - 1]:
                issues.append(
                    ValidationIssue(
                        severity=Severity.ERROR,
                        message=(
                            f"Date {dates[i].isoformat()} does not follow "
                            f"{dates[i - 1].isoformat()}"
                        ),
                        location=f"row {i + 1}",
                        error=NonMonotoneDatesError,
                    )
                )
        return issues

    def validate_values(
        self, values: np.ndarray, symbols: Sequence[str], min_rows: int | None = None
    ) -> list[ValidationIssue]:
        """Check a p x n value matrix for gaps and implausible entries."""
        min_rows = self.MIN_ASSETS if min_rows is None else min_rows
        issues: list[ValidationIssue] = []

        missing = np.argwhere(~np.isfinite(values))
        for row, col in missing:
            issues.append(
                ValidationIssue(
                    severity=Severity.ERROR,
                    message="Missing or non-numeric value",
                    symbol=symbols[row],
                    location=f"observation {col + 1}",
                    error=MissingValueError,
                )
            )
        if len(missing):
            return issues

        p, n = values.shape
        if p < min_rows or n < self.MIN_OBSERVATIONS:
            issues.append(
                ValidationIssue(
                    severity=Severity.ERROR,
                    message=f"Panel must have at least {min_rows} series and "
                    f"{self.MIN_OBSERVATIONS} observations (got {p} x {n})",
                    error=MissingValueError,
                )
            )
            return issues

        for i, sym in enumerate(symbols):
            row = values[i]
            if np.ptp(row) == 0.0:
                issues.append(
                    ValidationIssue(
                        severity=Severity.WARNING,
                        message="Constant return series",
                        symbol=sym,
                    )
                )
            elif np.max(np.abs(row)) > self.MAX_PLAUSIBLE_RETURN:
                issues.append(
                    ValidationIssue(
                        severity=Severity.WARNING,
                        message="Returns exceed 100% in one period; are they percents?",
                        symbol=sym,
                    )
                )
        return issues

    def validate_distances(
        self, d: np.ndarray, symbols: Sequence[str]
    ) -> list[ValidationIssue]:
        """Distance matrices must be square, symmetric, zero-diagonal and positive elsewhere."""
        issues: list[ValidationIssue] = []
        p = len(symbols)
        if d.shape != (p, p):
            issues.append(
                ValidationIssue(
                    severity=Severity.ERROR,
                    message=f"Distance matrix is {d.shape}, expected {(p, p)}",
                    error=MisalignmentError,
                )
            )
            return issues
        if not np.all(np.isfinite(d)):
            issues.append(
                ValidationIssue(
                    severity=Severity.ERROR,
                    message="Missing distance",
                    error=MissingValueError,
                )
            )
            return issues
        if not np.allclose(d, d.T, rtol=0.0, atol=1e-9):
            issues.append(
                ValidationIssue(
                    severity=Severity.ERROR,
                    message="Distance matrix is not symmetric",
                    error=MisalignmentError,
                )
            )
        if np.any(np.diag(d) != 0.0):
            issues.append(
                ValidationIssue(
                    severity=Severity.ERROR,
                    message="Distance matrix has a non-zero diagonal",
                    error=MisalignmentError,
                )
            )
        off = ~np.eye(p, dtype=bool)
        for i, j in np.argwhere(off & (d <= 0.0)):
            if i < j:
                issues.append(
                    ValidationIssue(
                        severity=Severity.ERROR,
                        message=f"Non-positive distance to '{symbols[j]}'",
                        symbol=symbols[i],
                        error=ZeroDistanceError,
                    )
                )
        return issues

    @staticmethod
    def raise_for_errors(issues: Sequence[ValidationIssue], source: str) -> None:
        """Log warnings, then raise the first error as its mapped exception."""
        for issue in issues:
            if issue.severity == Severity.WARNING:
                logger.warning("%s: %s", source, issue)
        errors = [i for i in issues if i.severity == Severity.ERROR]
        if not errors:
            return
        first = errors[0]
        extra = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
        exc_type = first.error or GrmError
        raise exc_type(f"{source}: {first}{extra}")
