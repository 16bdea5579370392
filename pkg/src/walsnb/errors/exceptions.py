"""Custom exception hierarchy for walsnb."""

from __future__ import annotations

from typing import Any


class WalsNbError(Exception):
    """Base exception for all walsnb errors."""

    def __init__(self, message: str = "", **kwargs: Any) -> None:
        super().__init__(message)
        self.message = message


# ── Input errors ──


class InputError(WalsNbError):
    """Bad arguments or data — the caller has to fix the input.

    Examples: nonpositive dispersion, mismatched dimensions, malformed CSV cell.
    """

    def __init__(self, message: str = "", error_type: str = "invalid_input") -> None:
        super().__init__(message)
        self.error_type = error_type


class DomainError(InputError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    def __init__(self, message: str = "") -> None:
        super().__init__(message, error_type="domain")


class DimensionMismatch(InputError, ValueError):
    """Array shapes that should agree do not."""

    def __init__(self, message: str = "", expected: Any = None, actual: Any = None) -> None:
        super().__init__(message, error_type="dimension_mismatch")
        self.expected = expected
        self.actual = actual


class DataError(InputError):
    """Ingested table is missing columns or holds unparseable / missing cells."""

    def __init__(
        self,
        message: str = "",
        row: int | None = None,
        column: str | None = None,
    ) -> None:
        super().__init__(message, error_type="data")
        self.row = row
        self.column = column


# ── Estimation errors ──


class EstimationError(WalsNbError):
    """Numerical failure while fitting — engines record these as failed runs."""

    def __init__(self, message: str = "", error_type: str = "estimation") -> None:
        super().__init__(message)
        self.error_type = error_type


class NonConvergence(EstimationError):
    """Iteration limit reached before the convergence criterion was met."""

    def __init__(self, message: str = "", iterations: int = 0, fit: Any = None) -> None:
        super().__init__(message, error_type="non_convergence")
        self.iterations = iterations
        self.fit = fit


class RankDeficient(EstimationError):
    """Design matrix does not have full column rank."""

    def __init__(self, message: str = "", rank: int = 0, columns: int = 0) -> None:
        super().__init__(message, error_type="rank_deficient")
        self.rank = rank
        self.columns = columns


class NumericOverflow(EstimationError):
    """Fitted means or likelihood left the finite floating-point range."""

    def __init__(self, message: str = "") -> None:
        super().__init__(message, error_type="numeric_overflow")


class DegenerateDenominator(EstimationError):
    """g²·Σk + ϱ·Σκ vanishes at the starting values."""

    def __init__(self, message: str = "", denom: float = 0.0) -> None:
        super().__init__(message, error_type="degenerate_denominator")
        self.denom = denom


class SingularFocusBlock(EstimationError):
    """Gram matrix of the weighted focus regressors cannot be factorized."""

    def __init__(self, message: str = "") -> None:
        super().__init__(message, error_type="singular_focus_block")


class SmwDenominatorZero(EstimationError):
    """Rank-1 update of the focus Gram matrix is not invertible."""

    def __init__(self, message: str = "", value: float = 0.0) -> None:
        super().__init__(message, error_type="smw_denominator_zero")
        self.value = value


class NotPositiveDefinite(EstimationError):
    """Auxiliary block X₂ᵀM₁X₂ has an eigenvalue at or below the floor."""

    def __init__(self, message: str = "", min_eigenvalue: float = 0.0) -> None:
        super().__init__(message, error_type="not_positive_definite")
        self.min_eigenvalue = min_eigenvalue


class QuadratureFailure(EstimationError):
    """Posterior-mean integral did not reach the requested tolerance."""

    def __init__(self, message: str = "", x: float = 0.0, abserr: float = 0.0) -> None:
        super().__init__(message, error_type="quadrature_failure")
        self.x = x
        self.abserr = abserr


# ── Scoring errors ──


class ScoringError(WalsNbError):
    """Predictive distribution cannot be scored."""


class DegenerateNorm(ScoringError):
    """Truncated probability norm is zero."""
