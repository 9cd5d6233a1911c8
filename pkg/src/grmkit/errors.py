"""Exception hierarchy for grmkit.

Every domain failure derives from :class:`GrmError`, itself a ``ValueError``,
so callers may catch either.
"""

from __future__ import annotations

from typing import Any


class GrmError(ValueError):
    """Base class for all grmkit errors."""


class UsageError(GrmError):
    """Invalid combination of command-line options."""


# Panel ingestion


class MissingValueError(GrmError):
    """Empty or non-numeric cell in an input table."""


class DuplicateSymbolError(GrmError):
    """The same asset symbol appears twice."""


class NonMonotoneDatesError(GrmError):
    """Timestamps are not strictly increasing."""


class EmptySplitError(GrmError):
    """A split leaves fewer than two observations on one side."""


class MisalignmentError(GrmError):
    """Two panels do not share the same timestamps or asset set."""


class IoFailureError(GrmError):
    """A file could not be read or written."""


# Moments and solvers


class DegenerateSampleError(GrmError):
    """Fewer than two observations."""


class SingularInputError(GrmError):
    """An unpenalized fit was requested on a singular covariance."""


class NotConvergedError(GrmError):
    """Iteration budget exhausted before the stopping rule was met."""

    def __init__(self, message: str, estimate: Any = None):
        super().__init__(message)
        self.estimate = estimate


class NonFiniteObjectiveError(GrmError):
    """The objective diverged."""


class InsufficientDataError(GrmError):
    """Not enough observations for the requested fold count."""


class PathError(GrmError):
    """A solver failure at one point of a regularization path."""

    def __init__(self, message: str, lam: float):
        super().__init__(message)
        self.lam = lam


# GRM algebra


class NonPositiveDiagonalError(GrmError):
    """A precision matrix has a non-positive diagonal entry."""


class DimensionMismatchError(GrmError):
    """Operands refer to different asset sets or sizes."""


class EmptySubsetError(GrmError):
    """The conditioning subset is empty."""


class FullSubsetError(GrmError):
    """The conditioning subset is the whole market."""


class SingularBlockError(GrmError):
    """A covariance block is numerically singular."""


# Factor and interaction models


class SingularFactorGramError(GrmError):
    """Factor returns are collinear."""


class TiedEigenvaluesError(GrmError):
    """Eigenvalues at the requested cut are numerically tied."""


class MissingFactorsError(GrmError):
    """An exogenous-factor prediction needs factor returns."""


class SingularOmegaError(GrmError):
    """A precision matrix cannot be inverted."""


class ZeroMeanEigenvectorError(GrmError):
    """Mean-one normalization of a mean-zero vector."""


class ZeroDistanceError(GrmError):
    """Two distinct assets at zero distance."""


class NoFeasiblePointError(GrmError):
    """No candidate interaction strength keeps I - kW invertible."""


# Evaluation and beta analytics


class ShapeMismatchError(GrmError):
    """Predicted and actual panels differ in shape."""


class UnknownKindError(GrmError):
    """Unrecognized model kind."""


class ZeroResidualError(GrmError):
    """A per-asset residual sum of squares is zero."""


class ConstantRowError(GrmError):
    """An asset row is constant, so R^2 is undefined."""


class InsufficientHistoryError(GrmError):
    """Backtest window and step exceed the available history."""


class ZeroVectorError(GrmError):
    """A zero vector has no direction."""


class ZeroMeanError(GrmError):
    """Dispersion of a vector with zero mean."""


class ZeroBetaError(GrmError):
    """Projection on a zero beta vector."""


# Graphs


class UnreachableTargetError(GrmError):
    """Requested edge count exceeds the number of asset pairs."""


class EmptyGraphError(GrmError):
    """A graph without vertices."""


class UncoveredVertexError(GrmError):
    """A vertex has no group label."""


# Synthetic markets


class NotPositiveDefiniteError(GrmError):
    """Synthetic market parameters do not give a positive definite matrix."""


class SingularSubmatrixError(GrmError):
    """A leave-one-out covariance block is singular."""


class DegenerateMarketError(GrmError):
    """The market portfolio has zero variance or no cross terms."""
