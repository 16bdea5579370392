"""Package-level default configuration values."""

from __future__ import annotations

from typing import Any

# Reproducibility
DEFAULT_SEED = 20240101

# ML alternation (IRLS for beta, Newton for rho)
DEFAULT_MAX_ITER = 2500
DEFAULT_TOL = 1e-8
DEFAULT_MAX_RHO_ITER = 100
DEFAULT_MAX_HALVINGS = 30
DEFAULT_RHO_START_BOUNDS = (1e-3, 1e6)

# Priors: simulation uses the robust prior, CV the closed-form one
DEFAULT_SIM_PRIOR = "weibull"
DEFAULT_CV_PRIOR = "laplace"

# Simulation
DEFAULT_RUNS = 300
DEFAULT_DESK_RUNS = 50
DEFAULT_N_EVAL = 4000
DEFAULT_SIM_TRUNCATION = 150
DEFAULT_OFFSET = 1.0986122886681098  # log(3)

# Cross-validation
DEFAULT_FOLDS = 10

# Concurrency
DEFAULT_THREADS = 1

# Output
DEFAULT_RECORD_TIMINGS = False
FLOAT_FORMAT = "%.17g"

# Log level
DEFAULT_LOG_LEVEL = "WARNING"


def get_defaults() -> dict[str, Any]:
    """Return all defaults as a flat dictionary for merging."""
    return {
        "seed": DEFAULT_SEED,
        "max_iter": DEFAULT_MAX_ITER,
        "tol": DEFAULT_TOL,
        "prior": None,
        "threads": DEFAULT_THREADS,
        "truncation": None,
        "folds": DEFAULT_FOLDS,
        "record_timings": DEFAULT_RECORD_TIMINGS,
        "log_level": DEFAULT_LOG_LEVEL,
    }
