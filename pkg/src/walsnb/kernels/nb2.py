"""NB2 kernels — log pmf, variance and the score/Hessian building blocks under the log link."""

from __future__ import annotations

from walsnb._compat import StrEnum
from typing import overload

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import digamma, gammaln, polygamma

from walsnb.errors import DimensionMismatch, DomainError, NumericOverflow
from walsnb.types import Dataset, FloatArray, KernelValues, Nb2Params


class Link(StrEnum):
    LOG = "log"


def _check_positive(name: str, value: FloatArray) -> None:
    if not np.all(value > 0):
        raise DomainError(f"{name} must be strictly positive")


def _check_counts(y: FloatArray) -> None:
    if not np.all(y >= 0):
        raise DomainError("counts must be nonnegative")


@overload
def nb2_log_pmf(y: float, mu: float, rho: float) -> float: ...
@overload
def nb2_log_pmf(y: ArrayLike, mu: ArrayLike, rho: ArrayLike) -> FloatArray | float: ...
def nb2_log_pmf(y: ArrayLike, mu: ArrayLike, rho: ArrayLike) -> FloatArray | float:
    """log f(y | mu, rho) via log-gamma, including the log(y!) term."""
    y_a = np.asarray(y, dtype=np.float64)
    mu_a = np.asarray(mu, dtype=np.float64)
    rho_a = np.asarray(rho, dtype=np.float64)
    _check_counts(y_a)
    _check_positive("mu", mu_a)
    _check_positive("rho", rho_a)
    out = (
        gammaln(y_a + rho_a)
        - gammaln(rho_a)
        - gammaln(y_a + 1.0)
        - rho_a * np.log1p(mu_a / rho_a)
        - y_a * np.log1p(rho_a / mu_a)
    )
    return float(out) if out.ndim == 0 else out


def nb2_pmf_table(mu: ArrayLike, rho: ArrayLike, upper: int) -> FloatArray:
    """Probabilities p_0..p_upper for each (mu, rho) pair; shape (m, upper + 1)."""
    mu_a = np.atleast_1d(np.asarray(mu, dtype=np.float64))[:, None]
    rho_a = np.broadcast_to(np.atleast_1d(np.asarray(rho, dtype=np.float64))[:, None], mu_a.shape)
    counts = np.arange(upper + 1, dtype=np.float64)[None, :]
    return np.exp(nb2_log_pmf(counts, mu_a, rho_a))


@overload
def nb2_variance(mu: float, rho: float) -> float: ...
@overload
def nb2_variance(mu: ArrayLike, rho: ArrayLike) -> FloatArray | float: ...
def nb2_variance(mu: ArrayLike, rho: ArrayLike) -> FloatArray | float:
    mu_a = np.asarray(mu, dtype=np.float64)
    rho_a = np.asarray(rho, dtype=np.float64)
    _check_positive("mu", mu_a)
    _check_positive("rho", rho_a)
    out = mu_a + mu_a**2 / rho_a
    return float(out) if out.ndim == 0 else out


def cumulant(theta: ArrayLike, rho: float) -> FloatArray | float:
    """b(theta, rho) = -rho log(1 - e^theta) of the exponential-family form."""
    th = np.asarray(theta, dtype=np.float64)
    if not np.all(th < 0):
        raise DomainError("canonical parameter must be negative")
    out = -rho * np.log(-np.expm1(th))
    return float(out) if out.ndim == 0 else out


def kernel_values(eta: ArrayLike, rho: float, y: ArrayLike, link: str = Link.LOG) -> KernelValues:
    """All per-observation kernels at linear predictor eta and dispersion rho."""
    if Link(link) is not Link.LOG:  # pragma: no cover - only one link exists
        raise DomainError(f"unsupported link {link}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    eta_a = np.atleast_1d(np.asarray(eta, dtype=np.float64))
    y_a = np.broadcast_to(np.asarray(y, dtype=np.float64), eta_a.shape)
    _check_counts(y_a)

    with np.errstate(over="ignore"):
        mu = np.exp(eta_a)
    if not np.all(np.isfinite(mu)) or not np.all(mu > 0):
        raise NumericOverflow("exp(eta) left the finite positive range")

    log_rho = np.log(rho)
    log_mu_rho = np.logaddexp(eta_a, log_rho)
    v = np.exp(log_rho - log_mu_rho)  # rho / (mu + rho)
    one_minus_v = np.exp(eta_a - log_mu_rho)  # mu / (mu + rho)
    mu_rho = mu + rho
    resid = y_a - mu

    return KernelValues(
        theta=-np.log1p(rho / mu),
        mu=mu,
        sigma2=mu + mu**2 / rho,
        v=v,
        omega=-v * one_minus_v,
        psi=v * one_minus_v * (y_a + rho),
        c=one_minus_v / mu_rho,
        kappa=-resid / mu_rho + log_rho - log_mu_rho + digamma(y_a + rho) - digamma(rho),
        k=resid / mu_rho**2
        + one_minus_v / rho
        + polygamma(1, y_a + rho)
        - polygamma(1, rho),
        g=float(rho),
        varrho=float(rho),
    )


def _linear_predictor(params: Nb2Params, X: FloatArray) -> FloatArray:
    beta = np.asarray(params.beta, dtype=np.float64)
    if X.shape[1] != beta.shape[0]:
        raise DimensionMismatch(
            f"design has {X.shape[1]} columns, beta has {beta.shape[0]}",
            expected=X.shape[1],
            actual=beta.shape[0],
        )
    return X @ beta


def log_likelihood(params: Nb2Params, data: Dataset) -> float:
    """Sum of nb2_log_pmf over observations at mu_i = exp(x_i' beta)."""
    eta = _linear_predictor(params, data.X)
    with np.errstate(over="ignore"):
        mu = np.exp(eta)
    if not np.all(np.isfinite(mu)) or not np.all(mu > 0):
        raise NumericOverflow("fitted means are not finite")
    return float(np.sum(nb2_log_pmf(data.y, mu, params.rho)))


def score(params: Nb2Params, data: Dataset) -> tuple[FloatArray, float]:
    """(s_beta, s_alpha): gradient of the log-likelihood in beta and alpha = log rho."""
    eta = _linear_predictor(params, data.X)
    kv = kernel_values(eta, params.rho, data.y)
    s_beta = data.X.T @ (kv.v * (data.y - kv.mu))
    s_alpha = kv.g * float(np.sum(kv.kappa))
    return s_beta, s_alpha
