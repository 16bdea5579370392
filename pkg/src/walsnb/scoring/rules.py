"""RMSE and the log, Brier (quadratic) and spherical scores for NB2 predictions.

All scores are negatively oriented: smaller is better. The Brier and
spherical scores need the squared norm sum_r p_r^2, truncated at count R.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import ArrayLike

from walsnb.errors import DegenerateNorm, DimensionMismatch, DomainError
from walsnb.kernels import nb2_log_pmf, nb2_pmf_table
from walsnb.types import FloatArray, PredictiveDistribution

logger = logging.getLogger(__name__)


def paired_arrays(a: ArrayLike, b: ArrayLike, names: tuple[str, str]) -> tuple[FloatArray, FloatArray]:
    a_arr = np.asarray(a, dtype=np.float64).reshape(-1)
    b_arr = np.asarray(b, dtype=np.float64).reshape(-1)
    if a_arr.shape != b_arr.shape:
        raise DimensionMismatch(
            f"{names[0]} has {a_arr.shape[0]} entries, {names[1]} has {b_arr.shape[0]}",
            expected=a_arr.shape[0],
            actual=b_arr.shape[0],
        )
    if a_arr.shape[0] == 0:
        raise DimensionMismatch("cannot score an empty evaluation set", expected=1, actual=0)
    return a_arr, b_arr


def check_truncation(R: int, y_max: float) -> None:
    if R < 0:
        raise DomainError(f"truncation must be nonnegative, got {R}")
    if y_max > R:
        logger.warning("Truncation R=%d is below the observed count %d", R, int(y_max))


def fmean(values: ArrayLike) -> float:
    """Compensated mean; the result does not depend on observation order."""
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    return math.fsum(v.tolist()) / v.shape[0]


# ── Single predictions ──


def rmse(mu_hat: ArrayLike, y: ArrayLike) -> float:
    mu_a, y_a = paired_arrays(mu_hat, y, ("mu_hat", "y"))
    return math.sqrt(fmean((y_a - mu_a) ** 2))


def log_score(p: PredictiveDistribution, y: int) -> float:
    return -float(nb2_log_pmf(float(y), p.mu, p.rho))


def squared_norm(p: PredictiveDistribution, R: int) -> float:
    table = nb2_pmf_table(p.mu, p.rho, R)[0]
    return math.fsum((table**2).tolist())


def brier_score(p: PredictiveDistribution, y: int, R: int) -> float:
    """-2 p_y + sum_{r<=R} p_r^2."""
    check_truncation(R, y)
    p_y = math.exp(-log_score(p, y))
    return -2.0 * p_y + squared_norm(p, R)


def spherical_score(p: PredictiveDistribution, y: int, R: int) -> float:
    """-p_y / sqrt(sum_{r<=R} p_r^2)."""
    check_truncation(R, y)
    norm2 = squared_norm(p, R)
    if not norm2 > 0:
        raise DegenerateNorm(f"truncated norm is zero for mu={p.mu}, rho={p.rho}, R={R}")
    return -math.exp(-log_score(p, y)) / math.sqrt(norm2)


# ── Evaluation-set averages ──


def score_components(
    mu: ArrayLike, rho: ArrayLike, y: ArrayLike, R: int
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """(log p_y, truncated squared norms, y) per observation."""
    mu_a, y_a = paired_arrays(mu, y, ("mu", "y"))
    rho_a = np.broadcast_to(np.asarray(rho, dtype=np.float64), mu_a.shape)
    check_truncation(R, float(np.max(y_a)))
    log_p = np.asarray(nb2_log_pmf(y_a, mu_a, rho_a))
    norms = np.sum(nb2_pmf_table(mu_a, rho_a, R) ** 2, axis=1)
    return log_p, norms, y_a


def average_log_score(mu: ArrayLike, rho: ArrayLike, y: ArrayLike) -> float:
    mu_a, y_a = paired_arrays(mu, y, ("mu", "y"))
    rho_a = np.broadcast_to(np.asarray(rho, dtype=np.float64), mu_a.shape)
    return -fmean(np.asarray(nb2_log_pmf(y_a, mu_a, rho_a)))


def average_brier_score(mu: ArrayLike, rho: ArrayLike, y: ArrayLike, R: int) -> float:
    log_p, norms, _ = score_components(mu, rho, y, R)
    return fmean(-2.0 * np.exp(log_p) + norms)


def average_spherical_score(mu: ArrayLike, rho: ArrayLike, y: ArrayLike, R: int) -> float:
    log_p, norms, _ = score_components(mu, rho, y, R)
    if np.any(norms <= 0):
        raise DegenerateNorm(f"truncated norm is zero for some prediction at R={R}")
    return fmean(-np.exp(log_p) / np.sqrt(norms))
