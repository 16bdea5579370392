"""NB2 distribution kernels."""

from walsnb.kernels.nb2 import (
    Link,
    cumulant,
    kernel_values,
    log_likelihood,
    nb2_log_pmf,
    nb2_pmf_table,
    nb2_variance,
    score,
)
from walsnb.kernels.sampling import sample_nb2

__all__ = [
    "Link",
    "cumulant",
    "kernel_values",
    "log_likelihood",
    "nb2_log_pmf",
    "nb2_pmf_table",
    "nb2_variance",
    "sample_nb2",
    "score",
]
