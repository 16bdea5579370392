"""Posterior means m(x) = E[d | x] for x ~ N(d, 1) under symmetric priors on d.

The Laplace prior has a closed form through log Phi. The Weibull-type prior
(density proportional to |d|^{q-1} exp(-c |d|^q)) is integrated numerically
after substituting u = |d|^q, which turns the prior into an exponential
density in u.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import IntegrationWarning, quad
from scipy.special import log_ndtr

from walsnb.config.schema import PriorSpec
from walsnb.errors import DomainError, QuadratureFailure
from walsnb.types import FloatArray, PriorFamily

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-8
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200


# ── Laplace ──


def laplace_posterior_mean(x: float, c: float) -> float:
    """x - c·tanh((A - B)/2) with A = -cx + log Phi(x - c), B = cx + log Phi(-x - c)."""
    a = -c * x + float(log_ndtr(x - c))
    b = c * x + float(log_ndtr(-x - c))
    return x - c * math.tanh(0.5 * (a - b))


# ── Weibull ──


def _weibull_integrands(x: float, q: float, c: float) -> tuple[float, float, float]:
    """(numerator, denominator, peak location) of the posterior mean for x >= 0.

    Both integrands carry the common factor exp(c·|x|^q) inside the exponent so
    the peak is of order one whatever the size of x.
    """
    u_peak = x**q
    inv_q = 1.0 / q

    def terms(t: float) -> tuple[float, float, float]:
        if t >= 1.0:
            return 0.0, 0.0, 0.0
        u = t / (1.0 - t)
        d = u**inv_q
        jac = 1.0 / (1.0 - t) ** 2
        base = -c * (u - u_peak)
        near = math.exp(base - 0.5 * (x - d) ** 2)
        far = math.exp(base - 0.5 * (x + d) ** 2)
        return d, near * jac, far * jac

    def numerator(t: float) -> float:
        d, near, far = terms(t)
        return d * (near - far)

    def denominator(t: float) -> float:
        _, near, far = terms(t)
        return near + far

    t_peak = u_peak / (1.0 + u_peak)
    num = _integrate(numerator, t_peak, x, "numerator")
    den = _integrate(denominator, t_peak, x, "denominator")
    return num, den, t_peak


def _integrate(fn: Callable[[float], float], t_peak: float, x: float, label: str) -> float:
    points = [t_peak] if 0.0 < t_peak < 1.0 else None
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, abserr = quad(
                fn,
                0.0,
                1.0,
                epsabs=QUAD_EPSABS,
                epsrel=QUAD_EPSREL,
                limit=QUAD_LIMIT,
                points=points,
            )
        except IntegrationWarning as e:
            raise QuadratureFailure(
                f"posterior-mean {label} integral failed at x={x:.6g}: {e}", x=x
            ) from e
    if abserr > max(QUAD_EPSABS, QUAD_EPSREL * abs(value)):
        raise QuadratureFailure(
            f"posterior-mean {label} error estimate {abserr:.3g} above tolerance at x={x:.6g}",
            x=x,
            abserr=abserr,
        )
    return float(value)


def weibull_posterior_mean(x: float, q: float, c: float) -> float:
    if x == 0.0:
        return 0.0
    num, den, _ = _weibull_integrands(abs(x), q, c)
    if not den > 0:
        raise QuadratureFailure(f"posterior-mean normalizer vanished at x={x:.6g}", x=x)
    return math.copysign(num / den, x)


# ── Dispatch ──


def posterior_mean(x: float, prior: PriorSpec) -> float:
    """m(x) for one standardized statistic."""
    if not math.isfinite(x):
        raise DomainError(f"posterior mean needs a finite argument, got {x}")
    hp = prior.hyperparameters
    if prior.family is PriorFamily.LAPLACE:
        return laplace_posterior_mean(x, hp["c"])
    if prior.family is PriorFamily.WEIBULL:
        return weibull_posterior_mean(x, hp["q"], hp["c"])
    return x


def posterior_means(xs: ArrayLike, prior: PriorSpec) -> FloatArray:
    """Elementwise posterior_mean."""
    values = np.asarray(xs, dtype=np.float64).reshape(-1)
    out = np.array([posterior_mean(float(x), prior) for x in values])
    logger.debug("posterior means (%s): %s -> %s", prior.family, values, out)
    return out
