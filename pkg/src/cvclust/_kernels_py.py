"""Pure-numpy implementations of the hot partition-scoring kernels.

Used when the compiled extension is unavailable (or disabled via the
``CVCLUST_PURE_PYTHON`` environment variable). Same contracts as the
compiled module; roughly an order of magnitude slower at large N.

All three kernels consume the neighbor table's row-relative log distances
(``lsc`` = log of each distance divided by its row maximum, so the last
column is exactly 0.0) and a label per point. "Same-label rank m" of point
``i`` means the m-th nearest neighbor of ``i`` among points sharing its
label, in the table's tie-stable ordering.
"""

from __future__ import annotations

import numpy as np


def weighted_same_label_lsc(nbr_idx, lsc, labels, weights) -> np.ndarray:
    """Per-point sum of ``weights[m-1] * lsc[i, position of same-label rank m]``.

    Entries of ``weights`` beyond a point's same-label neighbor count do not
    contribute; the caller accounts for that tail against the row maximum,
    whose relative log distance is exactly zero.
    """
    same = labels[nbr_idx] == labels[:, None]
    ranks = np.cumsum(same, axis=1, dtype=np.int32)
    padded = np.concatenate(([0.0], weights))
    contrib = padded[ranks] * lsc
    contrib[~same] = 0.0
    return contrib.sum(axis=1)


def kth_same_label_lsc(nbr_idx, lsc, labels, k: int) -> np.ndarray:
    """Per-point ``lsc`` value at the k-th same-label neighbor.

    Points with fewer than k same-label neighbors get 0.0, i.e. the row
    maximum: with insufficient cluster data the fallback distance is the
    farthest neighbor overall.
    """
    same = labels[nbr_idx] == labels[:, None]
    ranks = np.cumsum(same, axis=1, dtype=np.int32)
    n_same = ranks[:, -1]
    hit = same & (ranks == k)
    pos = np.argmax(hit, axis=1)
    out = lsc[np.arange(lsc.shape[0]), pos]
    return np.where(n_same >= k, out, 0.0)


def label_pair_lsc_sums(nbr_idx, lsc, labels, n_labels: int) -> np.ndarray:
    """Per-label sum of ``lsc`` over all ordered same-label neighbor pairs."""
    same = labels[nbr_idx] == labels[:, None]
    row_sums = np.where(same, lsc, 0.0).sum(axis=1)
    return np.bincount(labels, weights=row_sums, minlength=n_labels)
