"""walsnb — WALS model averaging for negative binomial (NB2) count regression."""

__version__ = "0.1.0"

from walsnb.config.schema import PriorSpec  # noqa: E402
from walsnb.ml import fit_ml  # noqa: E402
from walsnb.scoring import score_predictions  # noqa: E402
from walsnb.types import Dataset, Nb2Params, PriorFamily  # noqa: E402
from walsnb.wals import fit_walsnb, predict_mean  # noqa: E402

__all__ = [
    "Dataset",
    "Nb2Params",
    "PriorFamily",
    "PriorSpec",
    "__version__",
    "fit_ml",
    "fit_walsnb",
    "predict_mean",
    "score_predictions",
]
