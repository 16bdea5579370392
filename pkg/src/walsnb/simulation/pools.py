"""Coefficient pools shared by every scenario of an experiment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from walsnb.config import defaults
from walsnb.types import FloatArray

FOCUS_POOL_SIZE = 10
AUXILIARY_POOL_SIZE = 100
FOCUS_MAGNITUDE = (0.1, 0.25)
AUXILIARY_BOUND = 0.01

_POOL_STREAM = (0,)


@dataclass(frozen=True, eq=False)
class CoefficientPool:
    """True coefficients; a scenario with k1, k2 uses the first k1 and k2 entries."""

    beta1_pool: FloatArray
    beta2_pool: FloatArray
    offset: float = defaults.DEFAULT_OFFSET

    def beta1(self, k1: int) -> FloatArray:
        return self.beta1_pool[:k1]

    def beta2(self, k2: int) -> FloatArray:
        return self.beta2_pool[:k2]


def pool_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=_POOL_STREAM))


def generate_pools(seed: int) -> CoefficientPool:
    """Focus effects of magnitude 0.1–0.25 with random sign; auxiliary effects within ±0.01."""
    rng = pool_rng(seed)
    lo, hi = FOCUS_MAGNITUDE
    magnitude = rng.uniform(lo, hi, size=FOCUS_POOL_SIZE)
    sign = np.where(rng.random(FOCUS_POOL_SIZE) < 0.5, -1.0, 1.0)
    beta2 = rng.uniform(-AUXILIARY_BOUND, AUXILIARY_BOUND, size=AUXILIARY_POOL_SIZE)
    return CoefficientPool(beta1_pool=sign * magnitude, beta2_pool=beta2)
