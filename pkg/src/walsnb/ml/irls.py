"""IRLS for beta at fixed rho and the one-dimensional Newton update of rho."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import xlogy

from walsnb.errors import NumericOverflow, RankDeficient
from walsnb.kernels import kernel_values, nb2_log_pmf
from walsnb.types import FloatArray

logger = logging.getLogger(__name__)

# Dispersion is kept inside this range; the upper end is the Poisson limit.
RHO_FLOOR = 1e-8
RHO_CEILING = 1e8


@dataclass
class IrlsResult:
    beta: FloatArray
    mu: FloatArray
    iterations: int
    converged: bool
    failure_reason: str | None = None


def check_full_rank(X: FloatArray) -> None:
    """Pivoted QR rank test; raises RankDeficient on collinear columns."""
    n, k = X.shape
    if k == 0:
        return
    R = scipy.linalg.qr(X, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(R))
    tol = max(n, k) * np.finfo(np.float64).eps * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < k:
        raise RankDeficient(f"design has rank {rank} < {k} columns", rank=rank, columns=k)


def safe_mean(eta: FloatArray) -> FloatArray:
    with np.errstate(over="ignore"):
        mu = np.exp(eta)
    if not np.all(np.isfinite(mu)) or not np.all(mu > 0):
        raise NumericOverflow("fitted means left the finite positive range")
    return mu


def deviance(y: FloatArray, mu: FloatArray, rho: float) -> float:
    """NB2 deviance at fixed rho."""
    unit = xlogy(y, y / mu) - (y + rho) * np.log1p((y - mu) / (mu + rho))
    return float(2.0 * np.sum(unit))


def loglik(y: FloatArray, mu: FloatArray, rho: float) -> float:
    return float(np.sum(nb2_log_pmf(y, mu, rho)))


def irls(
    X: FloatArray,
    y: FloatArray,
    rho: float,
    beta: FloatArray | None,
    max_iter: int,
    tol: float,
    max_halvings: int,
) -> IrlsResult:
    """Fisher scoring for beta with rho held fixed.

    Starts from ``beta`` or, when None, from mu = y + 0.1. A step that lowers the
    likelihood is halved until it does not.
    """
    if beta is None:
        eta = np.log(y + 0.1)
        mu = y + 0.1
        current_ll = -math.inf
    else:
        eta = X @ beta
        mu = safe_mean(eta)
        current_ll = loglik(y, mu, rho)
    dev_old = deviance(y, mu, rho)

    for it in range(1, max_iter + 1):
        w = mu * rho / (mu + rho)
        z = eta + (y - mu) / mu
        sw = np.sqrt(w)
        proposal = scipy.linalg.lstsq(X * sw[:, None], z * sw, check_finite=False)[0]

        step = proposal if beta is None else proposal - beta
        base = np.zeros_like(proposal) if beta is None else beta
        for _ in range(max_halvings + 1):
            cand = base + step
            try:
                cand_mu = safe_mean(X @ cand)
            except NumericOverflow:
                step = step / 2.0
                continue
            cand_ll = loglik(y, cand_mu, rho)
            if cand_ll >= current_ll - 1e-10 * abs(current_ll):
                break
            step = step / 2.0
        else:
            logger.debug("IRLS step-halving exhausted at iteration %d", it)
            if beta is None:
                raise NumericOverflow("IRLS could not find a finite starting step")
            return IrlsResult(
                beta=beta,
                mu=mu,
                iterations=it,
                converged=False,
                failure_reason=f"IRLS step-halving exhausted at iteration {it}",
            )

        beta, mu, eta, current_ll = cand, cand_mu, X @ cand, cand_ll
        dev = deviance(y, mu, rho)
        if abs(dev - dev_old) / (abs(dev) + 0.1) < tol:
            return IrlsResult(beta=beta, mu=mu, iterations=it, converged=True)
        dev_old = dev

    assert beta is not None
    return IrlsResult(
        beta=beta,
        mu=mu,
        iterations=max_iter,
        converged=False,
        failure_reason=f"IRLS reached {max_iter} iterations",
    )


def moment_rho(y: FloatArray, mu: FloatArray, bounds: tuple[float, float]) -> float:
    """Method-of-moments dispersion sum(mu^2) / sum((y - mu)^2 - mu), clipped."""
    excess = float(np.sum((y - mu) ** 2 - mu))
    lo, hi = bounds
    if excess <= 0:
        return hi
    return float(np.clip(np.sum(mu**2) / excess, lo, hi))


def update_rho(
    y: FloatArray,
    mu: FloatArray,
    rho: float,
    max_iter: int,
    tol: float,
    max_halvings: int,
) -> tuple[float, int]:
    """Maximize the likelihood in rho for fixed means by safeguarded Newton steps.

    The Newton step uses the kappa (score) and k (curvature) kernels. Steps are
    taken on the log scale so rho stays positive; a step that lowers the
    likelihood is halved.
    """
    eta = np.log(mu)
    current = loglik(y, mu, rho)
    for it in range(1, max_iter + 1):
        kv = kernel_values(eta, rho, y)
        s = float(np.sum(kv.kappa))
        h = float(np.sum(kv.k))
        if h < 0 and rho - s / h > 0:
            log_step = math.log((rho - s / h) / rho)
        else:
            log_step = math.copysign(1.0, s)

        for _ in range(max_halvings + 1):
            cand = min(max(rho * math.exp(log_step), RHO_FLOOR), RHO_CEILING)
            cand_ll = loglik(y, mu, cand)
            if cand_ll >= current:
                break
            log_step /= 2.0
        else:
            return rho, it

        moved = abs(cand - rho) / rho
        rho, current = cand, cand_ll
        if moved < tol or rho in (RHO_FLOOR, RHO_CEILING):
            return rho, it
    return rho, max_iter
