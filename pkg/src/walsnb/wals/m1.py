"""Quadratic forms in M1 without building the n × n matrix.

With r = Psi^{-1/2} q and a = g·eps, let G = I + a r r'. Then

    M1 = G − G F (F'GF)^{-1} F'G,   F = the weighted focus design,

and F'GF = F'F + a (F'r)(r'F) is inverted by a Cholesky factor of F'F plus a
Sherman–Morrison–Woodbury rank-1 correction.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from walsnb.errors import SingularFocusBlock, SmwDenominatorZero
from walsnb.types import BarQuantities, FloatArray

_SMW_FLOOR = 1e-12


def g_cross(r: FloatArray, a: float, A: FloatArray, B: FloatArray) -> FloatArray:
    """A'GB = A'B + a (A'r)(r'B)."""
    return A.T @ B + a * np.multiply.outer(A.T @ r, r @ B)


class FocusBlock:
    """Factorized F'GF for repeated solves."""

    def __init__(self, F: FloatArray, r: FloatArray, a: float) -> None:
        self.F = F
        self.r = r
        self.a = a
        try:
            self._chol = scipy.linalg.cho_factor(F.T @ F, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise SingularFocusBlock(f"focus Gram matrix is not positive definite: {e}") from e
        self._u = F.T @ r
        self._c_inv_u = scipy.linalg.cho_solve(self._chol, self._u)
        self.smw_denominator = 1.0 + a * float(self._u @ self._c_inv_u)
        if abs(self.smw_denominator) < _SMW_FLOOR:
            raise SmwDenominatorZero(
                f"rank-1 update denominator {self.smw_denominator:.3g} is zero",
                value=self.smw_denominator,
            )

    def solve(self, b: FloatArray) -> FloatArray:
        """(F'GF)^{-1} b for a vector or matrix right-hand side."""
        c_inv_b = scipy.linalg.cho_solve(self._chol, b)
        correction = np.multiply.outer(self._c_inv_u, self._u @ c_inv_b)
        return c_inv_b - (self.a / self.smw_denominator) * correction

    def cross(self, A: FloatArray, B: FloatArray) -> FloatArray:
        return g_cross(self.r, self.a, A, B)

    def quadratic_form(self, A: FloatArray, B: FloatArray) -> FloatArray:
        """A'M1B."""
        return self.cross(A, B) - self.cross(A, self.F) @ self.solve(self.cross(self.F, B))


def focus_block(bars: BarQuantities) -> FocusBlock:
    # M1 is unchanged by column scaling of the focus block; unit norms help the factorization.
    X1_bar = bars.X1_bar
    norms = np.linalg.norm(X1_bar, axis=0)
    norms[norms == 0] = 1.0
    return FocusBlock(X1_bar / norms, bars.r, bars.a)


def m1_quadratic_form(
    bars: BarQuantities,
    A: FloatArray,
    B: FloatArray,
    block: FocusBlock | None = None,
) -> FloatArray:
    """A'M1B for n-row matrices (or vectors) A and B."""
    return (block or focus_block(bars)).quadratic_form(A, B)
