"""Gamma–Poisson sampling of NB2 counts."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from walsnb.errors import DomainError
from walsnb.types import FloatArray


def sample_nb2(
    mu: ArrayLike,
    rho: float,
    rng: np.random.Generator,
    size: int | tuple[int, ...] | None = None,
) -> FloatArray:
    """Draw lambda ~ Gamma(rho, mu/rho), then y ~ Poisson(lambda)."""
    mu_a = np.asarray(mu, dtype=np.float64)
    if not np.all(mu_a > 0) or not rho > 0:
        raise DomainError("sample_nb2 needs mu > 0 and rho > 0")
    lam = rng.gamma(shape=rho, scale=mu_a / rho, size=size)
    return rng.poisson(lam).astype(np.float64)
