"""Scaling and semi-orthogonal transforms of the focus and auxiliary designs."""

from __future__ import annotations

import logging

import numpy as np

from walsnb.errors import NotPositiveDefinite
from walsnb.types import BarQuantities, Dataset, FloatArray, TransformState
from walsnb.wals.m1 import FocusBlock, focus_block

logger = logging.getLogger(__name__)

_EIGEN_FLOOR = 1e-10


def _inverse_root_diagonal(gram: FloatArray, n: int, label: str) -> FloatArray:
    diag = np.diag(gram) / n
    if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
        raise NotPositiveDefinite(
            f"{label} has a nonpositive diagonal entry", min_eigenvalue=float(np.min(diag))
        )
    return np.asarray(1.0 / np.sqrt(diag))


def symmetric_roots(Xi: FloatArray) -> tuple[FloatArray, FloatArray, float]:
    """(Xi^{1/2}, Xi^{-1/2}, smallest eigenvalue) from one eigendecomposition."""
    eigvals, eigvecs = np.linalg.eigh(Xi)
    smallest = float(eigvals[0])
    if smallest <= _EIGEN_FLOOR:
        raise NotPositiveDefinite(
            f"scaled auxiliary block has eigenvalue {smallest:.3g} <= {_EIGEN_FLOOR:g}",
            min_eigenvalue=smallest,
        )
    root = np.sqrt(eigvals)
    half = (eigvecs * root) @ eigvecs.T
    neg_half = (eigvecs / root) @ eigvecs.T
    return half, neg_half, smallest


def build_transforms(data: Dataset, bars: BarQuantities) -> TransformState:
    """Delta scalings, Xi roots, the transformed designs Z and the coupling D."""
    n = data.n
    block = focus_block(bars)

    Delta1 = _inverse_root_diagonal(bars.X1_bar.T @ bars.X1_bar, n, "focus block")

    M22 = block.quadratic_form(bars.X2_bar, bars.X2_bar)
    M22 = 0.5 * (M22 + M22.T)
    Delta2 = _inverse_root_diagonal(M22, n, "auxiliary block")

    Xi = Delta2[:, None] * M22 * Delta2[None, :] / n
    Xi = 0.5 * (Xi + Xi.T)
    Xi_half, Xi_neg_half, smallest = symmetric_roots(Xi)
    logger.debug("Xi eigenvalue floor check passed: min=%.3g", smallest)

    sqrt_psi = bars.sqrt_psi[:, None]
    Z1 = data.X1 * Delta1
    Z2 = (data.X2 * Delta2) @ Xi_neg_half
    Z1_bar = sqrt_psi * Z1
    Z2_bar = sqrt_psi * Z2

    z_block = FocusBlock(Z1_bar, bars.r, bars.a)
    D_bar = z_block.solve(z_block.cross(Z1_bar, Z2_bar))

    return TransformState(
        Delta1=Delta1,
        Delta2=Delta2,
        Xi=Xi,
        Xi_half=Xi_half,
        Xi_neg_half=Xi_neg_half,
        Z1=Z1,
        Z2=Z2,
        Z1_bar=Z1_bar,
        Z2_bar=Z2_bar,
        D_bar=D_bar,
    )
