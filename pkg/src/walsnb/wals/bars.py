"""Barred quantities — kernels and transformed responses at the starting values."""

from __future__ import annotations

import logging

import numpy as np

from walsnb.errors import DegenerateDenominator, DimensionMismatch
from walsnb.kernels import kernel_values
from walsnb.types import BarQuantities, Dataset, Nb2Params

logger = logging.getLogger(__name__)

_DENOM_FLOOR = 1e-12


def compute_bars(data: Dataset, start: Nb2Params) -> BarQuantities:
    """Evaluate every intermediate of the linearized likelihood equations at ``start``.

    ``start.beta`` is ordered focus first, then auxiliary.
    """
    beta = np.asarray(start.beta, dtype=np.float64)
    if beta.shape[0] != data.k1 + data.k2:
        raise DimensionMismatch(
            f"start has {beta.shape[0]} coefficients, design has {data.k1 + data.k2}",
            expected=data.k1 + data.k2,
            actual=beta.shape[0],
        )
    y = data.y
    eta = data.X @ beta
    alpha = start.alpha
    kv = kernel_values(eta, start.rho, y)

    resid = y - kv.mu
    sqrt_psi = np.sqrt(kv.psi)
    q = kv.c * resid
    sum_kappa = float(np.sum(kv.kappa))
    denom = kv.g**2 * float(np.sum(kv.k)) + kv.varrho * sum_kappa
    if abs(denom) < _DENOM_FLOOR * data.n:
        raise DegenerateDenominator(f"dispersion curvature {denom:.3g} is numerically zero", denom)

    u = kv.v * resid / sqrt_psi
    y_bar = sqrt_psi * eta + u
    y0_bar = y_bar - kv.g * (q / sqrt_psi) * alpha
    t_bar = kv.g * sum_kappa - kv.g * float(q @ eta) - denom * alpha

    return BarQuantities(
        eta_bar=eta,
        mu_bar=kv.mu,
        psi_bar=kv.psi,
        v_bar=kv.v,
        c_bar=kv.c,
        u_bar=u,
        y_bar=y_bar,
        y0_bar=y0_bar,
        kappa_bar=kv.kappa,
        k_bar=kv.k,
        g_bar=kv.g,
        varrho_bar=kv.varrho,
        t_bar=t_bar,
        eps_bar=kv.g / denom,
        q_bar=q,
        denom=denom,
        alpha_bar=alpha,
        X1_bar=sqrt_psi[:, None] * data.X1,
        X2_bar=sqrt_psi[:, None] * data.X2,
    )


def alpha_from_predictor(bars: BarQuantities, linear_predictor: np.ndarray) -> float:
    """One-step dispersion estimate implied by a fitted linear predictor."""
    return -(bars.t_bar + bars.g_bar * float(bars.q_bar @ linear_predictor)) / bars.denom
