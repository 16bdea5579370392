"""NB2 maximum-likelihood estimation."""

from walsnb.ml.fit import fit_ml, ml_options_default

__all__ = ["fit_ml", "ml_options_default"]
