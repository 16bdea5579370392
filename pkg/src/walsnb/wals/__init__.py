"""WALS model averaging for NB2 regression."""

from walsnb.wals.bars import alpha_from_predictor, compute_bars
from walsnb.wals.estimator import fit_walsnb, predict_mean, shrinkage_weights, transformed_predictor
from walsnb.wals.m1 import FocusBlock, focus_block, g_cross, m1_quadratic_form
from walsnb.wals.one_step import (
    alpha_from_gamma,
    average_models,
    enumerate_restrictions,
    one_step_restricted_j,
    one_step_unrestricted,
)
from walsnb.wals.priors import posterior_mean, posterior_means
from walsnb.wals.transforms import build_transforms, symmetric_roots

__all__ = [
    "FocusBlock",
    "alpha_from_gamma",
    "alpha_from_predictor",
    "average_models",
    "build_transforms",
    "compute_bars",
    "enumerate_restrictions",
    "fit_walsnb",
    "focus_block",
    "g_cross",
    "m1_quadratic_form",
    "one_step_restricted_j",
    "one_step_unrestricted",
    "posterior_mean",
    "posterior_means",
    "predict_mean",
    "shrinkage_weights",
    "symmetric_roots",
    "transformed_predictor",
]
