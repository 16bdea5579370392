"""Score an evaluation set in one call."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike

from walsnb.errors import DegenerateNorm, DomainError
from walsnb.scoring.rules import fmean, rmse, score_components
from walsnb.types import Metric, ScoreReport

logger = logging.getLogger(__name__)


def score_predictions(mu: ArrayLike, rho: ArrayLike, y: ArrayLike, R: int) -> ScoreReport:
    """All four metrics from one pmf table.

    ``rho`` is a scalar or one value per observation.
    """
    mu_a = np.asarray(mu, dtype=np.float64).reshape(-1)
    rho_a = np.asarray(rho, dtype=np.float64)
    if not (np.all(mu_a > 0) and np.all(rho_a > 0)):
        raise DomainError("predictive distributions need mu > 0 and rho > 0")

    log_p, norms, y_a = score_components(mu_a, rho_a, y, R)
    if np.any(norms <= 0):
        raise DegenerateNorm(f"truncated norm is zero for some prediction at R={R}")
    p_y = np.exp(log_p)

    report = ScoreReport(
        rmse=rmse(mu_a, y_a),
        log_score=-fmean(log_p),
        brier_score=fmean(-2.0 * p_y + norms),
        spherical_score=fmean(-p_y / np.sqrt(norms)),
        truncation=R,
        max_count=int(y_a.max()) if y_a.size else 0,
        n=int(mu_a.shape[0]),
    )
    logger.debug("Scored %d predictions: %s", report.n, report.model_dump())
    return report


def report_metrics(report: ScoreReport) -> dict[Metric, float]:
    """Metric → value, the shape the engines store."""
    return {
        Metric.RMSE: report.rmse,
        Metric.LOG: report.log_score,
        Metric.BRIER: report.brier_score,
        Metric.SPHERICAL: report.spherical_score,
    }
