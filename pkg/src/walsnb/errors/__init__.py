"""Error handling — exception hierarchy shared by estimators, engines and the CLI."""

from walsnb.errors.exceptions import (
    DataError,
    DegenerateDenominator,
    DegenerateNorm,
    DimensionMismatch,
    DomainError,
    EstimationError,
    InputError,
    NonConvergence,
    NotPositiveDefinite,
    NumericOverflow,
    QuadratureFailure,
    RankDeficient,
    ScoringError,
    SingularFocusBlock,
    SmwDenominatorZero,
    WalsNbError,
)

__all__ = [
    "WalsNbError",
    "InputError",
    "DomainError",
    "DimensionMismatch",
    "DataError",
    "EstimationError",
    "NonConvergence",
    "RankDeficient",
    "NumericOverflow",
    "DegenerateDenominator",
    "SingularFocusBlock",
    "SmwDenominatorZero",
    "NotPositiveDefinite",
    "QuadratureFailure",
    "ScoringError",
    "DegenerateNorm",
]
