"""Max-norm (Chebyshev) distances and full per-point neighbor orderings.

The full N x (N-1) sorted table is precomputed once per dataset: the
rank-weighted uncertainty scores need every neighbor rank for every point,
and candidate ranking evaluates hundreds of partitions against one table,
so a single sort amortizes well at desk scale (N up to a few thousand).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, Partition

__all__ = [
    "chebyshev_distance",
    "NeighborTable",
    "build_neighbor_table",
    "knn_distance",
    "restricted_knn_distance",
]


def chebyshev_distance(a, b) -> float:
    """Max over coordinates of the absolute componentwise difference."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class NeighborTable:
    """Per-point neighbor orderings under the max norm.

    Row ``i`` lists the other N-1 points sorted by distance ascending, ties
    broken by point index so orderings are reproducible across runs. The
    ``rel_log_distances`` matrix holds ``log(d / d_max)`` per row: distance
    *ratios* within a row are invariant under uniform coordinate scaling,
    so scores built from this matrix inherit that invariance exactly.
    """

    indices: np.ndarray  # int32, N x (N-1)
    distances: np.ndarray  # float64, N x (N-1), each row nondecreasing
    n_dims: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_samples(self) -> int:
        return self.indices.shape[0]

    @property
    def rel_log_distances(self) -> np.ndarray:
        """log of each row's distances relative to the row maximum (<= 0)."""
        lsc = self._cache.get("rel_log")
        if lsc is None:
            lsc = np.log(self.distances / self.distances[:, -1:])
            lsc.flags.writeable = False
            self._cache["rel_log"] = lsc
        return lsc

    @property
    def log_max_distance(self) -> np.ndarray:
        """log of each row's largest neighbor distance."""
        lrm = self._cache.get("log_max")
        if lrm is None:
            lrm = np.log(self.distances[:, -1])
            lrm.flags.writeable = False
            self._cache["log_max"] = lrm
        return lrm


def _pairwise_chebyshev(points: np.ndarray) -> np.ndarray:
    n, d = points.shape
    dist = np.abs(points[:, 0, None] - points[None, :, 0])
    for c in range(1, d):
        np.maximum(dist, np.abs(points[:, c, None] - points[None, :, c]), out=dist)
    return dist


def build_neighbor_table(ds: Dataset) -> NeighborTable:
    """Sort every point's neighbors by (distance, index) ascending."""
    dist = _pairwise_chebyshev(ds.points)
    # Self-distance is forced below every true distance so it sorts first
    # and can be dropped; stable sort keeps ties in index order.
    np.fill_diagonal(dist, -1.0)
    order = np.argsort(dist, axis=1, kind="stable")[:, 1:].astype(np.int32)
    sorted_dist = np.take_along_axis(dist, order, axis=1)
    order.flags.writeable = False
    sorted_dist.flags.writeable = False
    return NeighborTable(indices=order, distances=sorted_dist, n_dims=ds.n_dims)


def _check_rank(table: NeighborTable, k: int) -> None:
    if not 1 <= k <= table.n_samples - 1:
        raise ValueError(f"neighbor rank k={k} out of range [1, {table.n_samples - 1}]")


def knn_distance(table: NeighborTable, i: int, k: int) -> float:
    """Distance from point ``i`` to its k-th nearest neighbor."""
    _check_rank(table, k)
    return float(table.distances[i, k - 1])


def restricted_knn_distance(table: NeighborTable, part: Partition, i: int, k: int) -> float:
    """Distance from point ``i`` to its k-th nearest same-cluster neighbor.

    When the cluster holds fewer than k other points the distance to the
    overall farthest neighbor is returned: with too little data in the
    cluster, the position of the point within it is maximally uncertain.
    """
    _check_rank(table, k)
    row = table.indices[i]
    same = np.flatnonzero(part.labels[row] == part.labels[i])
    if len(same) < k:
        return float(table.distances[i, -1])
    return float(table.distances[i, same[k - 1]])
