"""Comparison objectives: mutual information and the all-ranks-average
("MeanNN") clustering objective.

Both are maximized, unlike the uncertainty ratio which is minimized; the
``ObjectiveKind`` tag binds each objective to its optimization direction so
scans cannot mix them up.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

import numpy as np

from .data import Partition
from .errors import UndersizedClusterError
from .estimators import Score, bias_constant, conditional_data_entropy, kl_entropy
from .kernels import label_pair_lsc_sums

__all__ = ["ObjectiveKind", "mi_objective", "meannn_entropy", "nic_objective"]


class ObjectiveKind(Enum):
    CVR = "cvr"
    MI = "mi"
    NIC = "nic"

    @property
    def direction(self) -> str:
        return "min" if self is ObjectiveKind.CVR else "max"


def mi_objective(table, part: Partition, k: int = 3, d: int | None = None) -> Score:
    """Estimated mutual information between data and cluster labels:
    H(data) - sum over clusters of (n_j/N) H(cluster j), all via the
    nearest-neighbor estimator with per-cluster neighbor ranks.

    Partitions with a nonempty cluster of fewer than k+1 points cannot be
    scored and raise; scans treat them as invalid rather than failing.
    """
    h_all = kl_entropy(table, None, k, d).value
    h_cond = conditional_data_entropy(table, part, k, d).value
    return Score(h_all - h_cond, "mi")


@lru_cache(maxsize=None)
def _meannn_offset(n: int) -> float:
    """Mean of the estimator bias constant over all ranks 1..n-1."""
    return math.fsum(bias_constant(k, n) for k in range(1, n)) / (n - 1)


def meannn_entropy(table, subset=None, d: int | None = None) -> Score:
    """Entropy estimate that averages the nearest-neighbor estimator over
    every rank, which collapses to the mean log pairwise distance:
    (d / (n(n-1))) * sum over ordered pairs of log max-norm distance,
    plus an n-dependent offset (documented as the mean bias constant over
    ranks; only differences across partitions matter to the objective).

    Weighting all ranks equally is what makes this estimator scale with
    the log of the gap between distant clusters instead of converging.
    """
    d = table.n_dims if d is None else int(d)
    n_total = table.n_samples
    if subset is None:
        subset = np.arange(n_total, dtype=np.intp)
    else:
        subset = np.asarray(subset, dtype=np.intp)
    n = subset.shape[0]
    if n < 2:
        raise UndersizedClusterError("mean pairwise log distance needs >= 2 points")
    mask_labels = np.ones(n_total, dtype=np.int32)
    mask_labels[subset] = 0
    pair_sums = label_pair_lsc_sums(
        table.indices, table.rel_log_distances, mask_labels, 2
    )
    log_pair_total = pair_sums[0] + (n - 1) * math.fsum(
        table.log_max_distance[subset].tolist()
    )
    value = (d / (n * (n - 1))) * log_pair_total + _meannn_offset(n)
    return Score(value, "nic")


def nic_objective(table, part: Partition, d: int | None = None) -> Score:
    """Mutual-information-style objective built on the all-ranks-average
    entropy: minus the cluster-size-weighted average of per-cluster
    estimates (the partition-independent total entropy term is dropped).

    Every nonempty cluster needs at least 2 points; smaller ones make the
    partition invalid for this objective.
    """
    d = table.n_dims if d is None else int(d)
    n = table.n_samples
    nonempty = np.flatnonzero(part.counts)
    if part.counts[nonempty].min() < 2:
        raise UndersizedClusterError("every cluster needs >= 2 points")
    pair_sums = label_pair_lsc_sums(
        table.indices, table.rel_log_distances, part.labels, part.n_labels
    )
    lrm_sums = np.bincount(
        part.labels, weights=table.log_max_distance, minlength=part.n_labels
    )
    total = 0.0
    for j in nonempty:
        n_j = int(part.counts[j])
        log_pair_total = pair_sums[j] + (n_j - 1) * lrm_sums[j]
        h_j = (d / (n_j * (n_j - 1))) * log_pair_total + _meannn_offset(n_j)
        total -= (n_j / n) * h_j
    return Score(total, "nic")
