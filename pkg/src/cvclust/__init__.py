"""Non-parametric clustering by minimal coarse-graining consistency violation.

Scores a partition by the estimated uncertainty of its cluster labels
(how badly coarse-graining breaks the entropy bookkeeping on finite data),
optimizes that score with a Gram-matrix relaxation plus randomized
rounding, and ships the synthetic and real-data benchmark drivers.
"""

from .data import Dataset, Partition, SeedSpec, jitter, load_csv, standardize
from .estimators import (
    Score,
    consistency_violation,
    cvr,
    label_uncertainty_k,
    plug_in_entropy,
    resampled_label_uncertainty,
    total_label_uncertainty,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .neighbors import NeighborTable, build_neighbor_table

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Partition",
    "SeedSpec",
    "load_csv",
    "standardize",
    "jitter",
    "NeighborTable",
    "build_neighbor_table",
    "Score",
    "plug_in_entropy",
    "consistency_violation",
    "label_uncertainty_k",
    "resampled_label_uncertainty",
    "total_label_uncertainty",
    "cvr",
    "KERNEL_BACKEND",
    "__version__",
]
