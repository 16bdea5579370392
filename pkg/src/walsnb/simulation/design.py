"""Equicorrelated Gaussian regressors and NB2 responses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from walsnb.errors import DomainError
from walsnb.kernels import sample_nb2
from walsnb.simulation.pools import CoefficientPool
from walsnb.types import FloatArray


def sample_design(n: int, k: int, b: float, rng: np.random.Generator) -> FloatArray:
    """n × k rows from N(0, (1-b) I + b 11') via x = sqrt(b) z0 + sqrt(1-b) z."""
    if not 0.0 <= b < 1.0:
        raise DomainError(f"pairwise correlation b must lie in [0, 1), got {b}")
    if n < 1 or k < 0:
        raise DomainError(f"design size must be positive, got n={n}, k={k}")
    z0 = rng.standard_normal((n, 1))
    z = rng.standard_normal((n, k))
    return np.sqrt(b) * z0 + np.sqrt(1.0 - b) * z


@dataclass(frozen=True, eq=False)
class SimulatedSample:
    """Raw regressors (no constant), true means and drawn counts."""

    y: FloatArray
    x1: FloatArray
    x2: FloatArray
    mu: FloatArray


def draw_sample(
    n: int,
    k1: int,
    k2: int,
    rho: float,
    b: float,
    pool: CoefficientPool,
    rng: np.random.Generator,
) -> SimulatedSample:
    """One training or validation set from the data-generating process."""
    x = sample_design(n, k1 + k2, b, rng)
    x1, x2 = x[:, :k1], x[:, k1:]
    mu = np.exp(pool.offset + x1 @ pool.beta1(k1) + x2 @ pool.beta2(k2))
    y = sample_nb2(mu, rho, rng)
    return SimulatedSample(y=y, x1=x1, x2=x2, mu=mu)
