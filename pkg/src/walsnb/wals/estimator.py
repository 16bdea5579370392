"""WALS-NB — one-step linearization at the ML start, semi-orthogonal transform, prior shrinkage."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike

from walsnb.config.schema import PriorSpec
from walsnb.errors import DimensionMismatch, DomainError, NonConvergence, NumericOverflow
from walsnb.types import Dataset, FloatArray, MlFit, WalsFit
from walsnb.wals.bars import compute_bars
from walsnb.wals.one_step import alpha_from_gamma, one_step_unrestricted
from walsnb.wals.priors import posterior_means
from walsnb.wals.transforms import build_transforms

logger = logging.getLogger(__name__)


def shrinkage_weights(gamma2_tilde: FloatArray, gamma2_hat: FloatArray) -> FloatArray:
    """Diagonal of W with gamma2_hat = W gamma2_tilde; zero where gamma2_tilde is zero."""
    out = np.zeros_like(gamma2_tilde)
    nz = gamma2_tilde != 0
    out[nz] = gamma2_hat[nz] / gamma2_tilde[nz]
    return out


def fit_walsnb(
    data: Dataset,
    prior: PriorSpec,
    start: MlFit,
    *,
    allow_unconverged: bool = False,
    fixed_weights: Sequence[float] | FloatArray | None = None,
) -> WalsFit:
    """Model-averaged NB2 fit of ``data``.

    ``start`` is the unrestricted ML fit on [X1 X2] (focus columns first).
    ``fixed_weights`` bypasses the prior and applies the given diagonal of W
    directly, which is how a single submodel is reproduced.
    """
    if data.k2 < 1:
        raise DimensionMismatch("WALS needs at least one auxiliary regressor", expected=1, actual=0)
    if not start.converged:
        if not allow_unconverged:
            raise NonConvergence(
                "starting values come from an unconverged ML fit",
                iterations=start.outer_iterations,
                fit=start,
            )
        logger.warning("Using unconverged ML start: %s", start.failure_reason)

    bars = compute_bars(data, start.params)
    transforms = build_transforms(data, bars)
    unrestricted = one_step_unrestricted(data, bars, transforms)
    gamma2_u = unrestricted.gamma2_tilde_u
    root_n = float(np.sqrt(data.n))

    if fixed_weights is not None:
        w_diag = np.asarray(fixed_weights, dtype=np.float64).reshape(-1)
        if w_diag.shape[0] != data.k2:
            raise DimensionMismatch(
                "one weight per auxiliary column", expected=data.k2, actual=w_diag.shape[0]
            )
        if np.any((w_diag < 0) | (w_diag > 1)):
            raise DomainError("shrinkage weights must lie in [0, 1]")
        gamma2_hat = w_diag * gamma2_u
    else:
        gamma2_hat = posterior_means(root_n * gamma2_u, prior) / root_n
        w_diag = shrinkage_weights(gamma2_u, gamma2_hat)

    gamma1_hat = unrestricted.gamma1_tilde_r - transforms.D_bar @ gamma2_hat
    alpha_hat = alpha_from_gamma(bars, transforms, gamma1_hat, gamma2_hat)
    if not np.isfinite(np.exp(alpha_hat)):
        raise NumericOverflow(f"dispersion estimate exp({alpha_hat:.6g}) overflowed")

    beta1_hat = transforms.Delta1 * gamma1_hat
    beta2_hat = transforms.Delta2 * (transforms.Xi_neg_half @ gamma2_hat)
    logger.debug("WALS fit: alpha=%.6g, weights=%s", alpha_hat, w_diag)

    return WalsFit(
        gamma1_hat=gamma1_hat,
        gamma2_hat=gamma2_hat,
        w_diag=w_diag,
        gamma2_tilde_u=gamma2_u,
        gamma1_tilde_r=unrestricted.gamma1_tilde_r,
        alpha_hat=alpha_hat,
        beta1_hat=beta1_hat,
        beta2_hat=beta2_hat,
        prior=prior,
        start=start,
        transforms=transforms,
        n=data.n,
        names1=data.names1,
        names2=data.names2,
        start_override=not start.converged,
    )


def predict_mean(fit: WalsFit, Xnew: ArrayLike) -> FloatArray:
    """exp([X1 X2] beta_hat) for new rows laid out focus columns first."""
    X = np.atleast_2d(np.asarray(Xnew, dtype=np.float64))
    beta = fit.beta_hat
    if X.shape[1] != beta.shape[0]:
        raise DimensionMismatch(
            f"new design has {X.shape[1]} columns, fit has {beta.shape[0]}",
            expected=beta.shape[0],
            actual=X.shape[1],
        )
    with np.errstate(over="ignore"):
        mu = np.exp(X @ beta)
    if not np.all(np.isfinite(mu)):
        raise NumericOverflow("predicted means overflowed")
    return np.asarray(mu)


def transformed_predictor(fit: WalsFit, X1: ArrayLike, X2: ArrayLike) -> FloatArray:
    """Z1 gamma1_hat + Z2 gamma2_hat evaluated on new rows; equals X beta_hat."""
    t = fit.transforms
    Z1 = np.asarray(X1, dtype=np.float64) * t.Delta1
    Z2 = (np.asarray(X2, dtype=np.float64) * t.Delta2) @ t.Xi_neg_half
    return np.asarray(Z1 @ fit.gamma1_hat + Z2 @ fit.gamma2_hat)
