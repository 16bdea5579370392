"""Random K-fold partition with nested training prefixes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from walsnb.errors import DomainError

IndexArray = NDArray[np.intp]


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Fold membership from one random permutation.

    ``assignments[i]`` is the 1-based fold of observation i. Folds are
    contiguous blocks of ``permutation``; the first ``n % K`` are one larger.
    """

    assignments: NDArray[np.int64]
    permutation: IndexArray
    K: int
    seed: int

    @property
    def n(self) -> int:
        return int(self.assignments.shape[0])

    def validation(self, k: int) -> IndexArray:
        """Observations of fold k (1-based), in permutation order."""
        return self.permutation[self.assignments[self.permutation] == k]

    def training(self, k: int) -> IndexArray:
        """Every other observation, in permutation order."""
        return self.permutation[self.assignments[self.permutation] != k]

    def training_prefix(self, k: int, t: int) -> IndexArray:
        """First t observations of fold k's training portion; nested in t."""
        train = self.training(k)
        if not 1 <= t <= train.shape[0]:
            raise DomainError(f"training size {t} outside 1..{train.shape[0]} for fold {k}")
        return train[:t]

    def sizes(self) -> list[int]:
        return [int(np.sum(self.assignments == k)) for k in range(1, self.K + 1)]

    @property
    def t_max(self) -> int:
        """Largest training size every fold can supply."""
        return self.n - max(self.sizes())


def make_folds(n: int, K: int, seed: int) -> FoldPlan:
    if K < 2:
        raise DomainError(f"need at least 2 folds, got K={K}")
    if n < K:
        raise DomainError(f"cannot split n={n} observations into K={K} folds")
    rng = np.random.default_rng(seed)
    permutation = rng.permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    for k, block in enumerate(np.array_split(permutation, K), start=1):
        assignments[block] = k
    return FoldPlan(assignments=assignments, permutation=permutation, K=K, seed=seed)
