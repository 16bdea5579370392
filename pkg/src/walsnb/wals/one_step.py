"""One-step estimators in the transformed space and their model average."""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import numpy as np

from walsnb.errors import DimensionMismatch, DomainError
from walsnb.types import (
    BarQuantities,
    Dataset,
    FloatArray,
    OneStepSolution,
    RestrictionMatrix,
    TransformState,
    UnrestrictedSolution,
)
from walsnb.wals.bars import alpha_from_predictor
from walsnb.wals.m1 import FocusBlock

# 2^k2 submodels; past this the enumeration is only useful as a test oracle anyway.
MAX_ENUMERATED_K2 = 20


def alpha_from_gamma(
    bars: BarQuantities,
    transforms: TransformState,
    gamma1: FloatArray,
    gamma2: FloatArray,
) -> float:
    """Dispersion one-step estimate; affine in (gamma1, gamma2)."""
    return alpha_from_predictor(bars, transforms.Z1 @ gamma1 + transforms.Z2 @ gamma2)


def one_step_unrestricted(
    data: Dataset,
    bars: BarQuantities,
    transforms: TransformState,
) -> UnrestrictedSolution:
    """Fully restricted focus estimate and the unrestricted pair it implies."""
    Z1_bar, Z2_bar = transforms.Z1_bar, transforms.Z2_bar
    block = FocusBlock(Z1_bar, bars.r, bars.a)
    w = bars.w

    gamma1_r = block.solve(Z1_bar.T @ w)
    gamma2_u = (Z2_bar.T @ w - block.cross(Z2_bar, Z1_bar) @ gamma1_r) / data.n
    gamma1_u = gamma1_r - transforms.D_bar @ gamma2_u

    return UnrestrictedSolution(
        gamma1_tilde_u=gamma1_u,
        gamma2_tilde_u=gamma2_u,
        gamma1_tilde_r=gamma1_r,
        alpha_tilde_u=alpha_from_gamma(bars, transforms, gamma1_u, gamma2_u),
    )


def one_step_restricted_j(
    restriction: RestrictionMatrix,
    unrestricted: UnrestrictedSolution,
    transforms: TransformState,
    bars: BarQuantities,
) -> OneStepSolution:
    """Submodel j: excluded auxiliaries zeroed, the focus block adjusted through D."""
    if restriction.k2 != unrestricted.gamma2_tilde_u.shape[0]:
        raise DimensionMismatch(
            "restriction width does not match the auxiliary block",
            expected=unrestricted.gamma2_tilde_u.shape[0],
            actual=restriction.k2,
        )
    gamma2 = restriction.keep * unrestricted.gamma2_tilde_u
    gamma1 = unrestricted.gamma1_tilde_r - transforms.D_bar @ gamma2
    return OneStepSolution(
        gamma1=gamma1,
        gamma2=gamma2,
        alpha=alpha_from_gamma(bars, transforms, gamma1, gamma2),
    )


def enumerate_restrictions(k2: int) -> list[RestrictionMatrix]:
    """Every subset of auxiliary columns to exclude, smallest first."""
    if not 0 <= k2 <= MAX_ENUMERATED_K2:
        raise DomainError(f"cannot enumerate 2^{k2} submodels (limit k2 <= {MAX_ENUMERATED_K2})")
    return [
        RestrictionMatrix(excluded=frozenset(subset), k2=k2)
        for size in range(k2 + 1)
        for subset in itertools.combinations(range(k2), size)
    ]


def average_models(
    solutions: Sequence[OneStepSolution],
    lambdas: Sequence[float] | FloatArray,
) -> OneStepSolution:
    """Weighted sum of submodel solutions; weights must be nonnegative and sum to one."""
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.shape[0] != len(solutions) or not solutions:
        raise DimensionMismatch(
            "one weight per submodel is required", expected=len(solutions), actual=lam.shape[0]
        )
    if np.any(lam < 0) or not np.isclose(lam.sum(), 1.0, rtol=0, atol=1e-12):
        raise DomainError("model weights must be nonnegative and sum to one")
    return OneStepSolution(
        gamma1=lam @ np.stack([s.gamma1 for s in solutions]),
        gamma2=lam @ np.stack([s.gamma2 for s in solutions]),
        alpha=float(lam @ np.array([s.alpha for s in solutions])),
    )
