"""Cross-validated learning curves on user data."""

from walsnb.cv.curve import (
    LearningCurve,
    learning_curve,
    learning_curve_from_config,
    register_procedure,
    registered_procedures,
    unregister_procedure,
    write_learning_curve,
)
from walsnb.cv.design import build_design, term_values, unrestricted_spec
from walsnb.cv.folds import FoldPlan, make_folds
from walsnb.cv.ingest import ingest_csv

__all__ = [
    "FoldPlan",
    "LearningCurve",
    "build_design",
    "ingest_csv",
    "learning_curve",
    "learning_curve_from_config",
    "make_folds",
    "register_procedure",
    "registered_procedures",
    "term_values",
    "unregister_procedure",
    "unrestricted_spec",
    "write_learning_curve",
]
