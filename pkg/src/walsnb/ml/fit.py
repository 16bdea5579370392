"""Fully iterated NB2 maximum likelihood — alternates IRLS for beta and Newton for rho."""

from __future__ import annotations

import logging
import math

from walsnb.config.schema import MlOptions
from walsnb.errors import NonConvergence
from walsnb.ml.irls import check_full_rank, deviance, irls, loglik, moment_rho, update_rho
from walsnb.types import Dataset, MlFit, Nb2Params

logger = logging.getLogger(__name__)


def ml_options_default() -> MlOptions:
    """2500 outer and IRLS iterations, relative deviance tolerance 1e-8."""
    return MlOptions()


def fit_ml(data: Dataset, options: MlOptions | None = None) -> MlFit:
    """Fit NB2 by ML on all columns of ``data`` (focus then auxiliary).

    Raises NonConvergence carrying the partial fit when an iteration limit is hit.
    """
    options = options or ml_options_default()
    X, y = data.X, data.y
    check_full_rank(X)

    # Poisson-like pass gives the means for the moment start of rho
    hi = options.rho_start_bounds[1]
    start = irls(X, y, hi, None, options.max_irls_iter, options.tol, options.max_halvings)
    rho = moment_rho(y, start.mu, options.rho_start_bounds)
    beta, mu = start.beta, start.mu
    inner = start.iterations
    logger.debug("ML start: rho0=%.6g after %d IRLS iterations", rho, inner)

    dev_old = deviance(y, mu, rho)
    trace: list[float] = []
    converged = False
    reason: str | None = None
    outer = 0
    for outer in range(1, options.max_outer_iter + 1):
        rho, _ = update_rho(y, mu, rho, options.max_rho_iter, options.tol, options.max_halvings)
        step = irls(X, y, rho, beta, options.max_irls_iter, options.tol, options.max_halvings)
        beta, mu = step.beta, step.mu
        inner += step.iterations
        trace.append(loglik(y, mu, rho))
        if not step.converged:
            reason = step.failure_reason
            break

        dev = deviance(y, mu, rho)
        change = abs(dev - dev_old) / (abs(dev) + 0.1)
        logger.debug("ML outer %d: rho=%.8g deviance=%.10g change=%.3g", outer, rho, dev, change)
        if change < options.tol:
            converged = True
            break
        dev_old = dev
    else:
        reason = f"alternation reached {options.max_outer_iter} iterations"

    fit = MlFit(
        params=Nb2Params(beta=beta, alpha=math.log(rho)),
        loglik=trace[-1] if trace else loglik(y, mu, rho),
        converged=converged,
        outer_iterations=outer,
        inner_iterations=inner,
        deviance=deviance(y, mu, rho),
        failure_reason=reason,
        loglik_trace=tuple(trace),
    )
    if not converged:
        raise NonConvergence(f"ML fit failed to converge: {reason}", iterations=outer, fit=fit)
    return fit
