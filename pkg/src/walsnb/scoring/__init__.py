"""Point and distributional forecast scores."""

from walsnb.scoring.report import report_metrics, score_predictions
from walsnb.scoring.rules import (
    average_brier_score,
    average_log_score,
    average_spherical_score,
    brier_score,
    log_score,
    rmse,
    spherical_score,
    squared_norm,
)

__all__ = [
    "average_brier_score",
    "average_log_score",
    "average_spherical_score",
    "brier_score",
    "log_score",
    "report_metrics",
    "rmse",
    "score_predictions",
    "spherical_score",
    "squared_norm",
]
