"""Entropy estimators and coarse-graining consistency scores.

All values are natural-log based (nats) internally; conversion to bits
happens only at reporting boundaries via ``Score.in_bits``. Mixing bases
internally would corrupt the digamma-based bias constant, and every
argmin/argmax decision in the package is unit-invariant anyway.

The central quantities are built from two neighbor distances per point:
the distance to its k-th nearest neighbor overall, and the distance to its
k-th nearest neighbor *within its own cluster*. For a partition that cuts
through dense regions the restricted distance is much larger, which shows
up as estimated uncertainty about the cluster label. Scores based on the
log-ratio of these distances are computed from the table's row-relative
log distances, so they are exactly invariant under uniform scaling.

Summations over points are combined with ``math.fsum`` (exactly rounded),
which makes results independent of sample order and of any internal
parallel split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Partition
from .errors import UndefinedScoreError, UndersizedClusterError
from .kernels import kth_same_label_lsc, weighted_same_label_lsc

__all__ = [
    "Score",
    "digamma",
    "bias_constant",
    "total_rank_weights",
    "resampled_rank_weights",
    "kl_entropy",
    "plug_in_entropy",
    "conditional_data_entropy",
    "consistency_violation",
    "label_uncertainty_k",
    "resampled_label_uncertainty",
    "total_label_uncertainty",
    "cvr",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class Score:
    """A scalar score in nats plus a tag describing what it measures."""

    value: float
    kind: str

    def __float__(self) -> float:
        return self.value

    @property
    def in_bits(self) -> float:
        return self.value / LN2


# Asymptotic tail coefficients (Bernoulli numbers B_2n / 2n) for digamma.
_DIGAMMA_TAIL = (
    -1.0 / 12,
    1.0 / 120,
    -1.0 / 252,
    1.0 / 240,
    -1.0 / 132,
    691.0 / 32760,
)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function, accurate to ~1e-14.

    Small arguments are shifted up with the recurrence psi(x+1) = psi(x) + 1/x
    until the asymptotic series applies.
    """
    if x <= 0:
        raise ValueError("digamma requires x > 0")
    shift = 0.0
    while x < 6.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    total = math.log(x) - 0.5 / x
    power = inv2
    for coeff in _DIGAMMA_TAIL:
        total += coeff * power
        power *= inv2
    return shift + total


def bias_constant(k: int, n: int) -> float:
    """Additive constant psi(n) - psi(k) + ln(2k/n) of the box estimator.

    Matches the asymptotically unbiased nearest-neighbor entropy estimator;
    tends to ln 2 as n grows with k fixed.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    return digamma(n) - digamma(k) + math.log(2.0 * k / n)


def total_rank_weights(k: int, n: int) -> np.ndarray:
    """Rank weights k/(m(m+1)) for m = k..n-1 (zero below rank k).

    These arise from integrating the resampling weights over all retention
    rates; they telescope to a total mass of exactly 1 - k/n.
    """
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    m = np.arange(1, n, dtype=np.float64)
    w = k / (m * (m + 1))
    w[: k - 1] = 0.0
    return w


def resampled_rank_weights(k: int, n: int, alpha: float) -> np.ndarray:
    """Probability that the k-th nearest *surviving* neighbor sits at
    original rank m, when every point is kept independently with
    probability 1 - alpha: C(m-1, k-1) (1-alpha)^k alpha^(m-k).

    Returned truncated to ranks m = 1..n-1; the tail mass beyond rank n-1
    is the probability that fewer than k of the n-1 neighbors survive.
    Binomial coefficients are accumulated in log space to stay finite for
    n in the thousands.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    w = np.zeros(n - 1, dtype=np.float64)
    if alpha == 0.0:
        w[k - 1] = 1.0
        return w
    m = np.arange(k, n, dtype=np.float64)
    # log C(m-1, k-1) accumulated incrementally: C(m-1,k-1)/C(m-2,k-1) = (m-1)/(m-k)
    log_binom = np.zeros(m.shape[0])
    if m.shape[0] > 1:
        log_binom[1:] = np.cumsum(np.log(m[1:] - 1.0) - np.log(m[1:] - k))
    logw = log_binom + k * math.log1p(-alpha) + (m - k) * math.log(alpha)
    w[k - 1 :] = np.exp(logw)
    return w


def _fsum(values) -> float:
    return math.fsum(values.tolist())


def _resolve_d(table, d: int | None) -> int:
    return table.n_dims if d is None else int(d)


def _nonempty(part: Partition):
    return np.flatnonzero(part.counts)


def kl_entropy(table, subset=None, k: int = 1, d: int | None = None) -> Score:
    """Nearest-neighbor differential entropy of the dataset or of a subset.

    ln(n/k) + (d/n) * sum of log k-th neighbor distances + bias constant,
    with neighbor ranks computed within the subset when one is given.
    May be negative, as differential entropy can be.
    """
    d = _resolve_d(table, d)
    n_total = table.n_samples
    if subset is None:
        if not 1 <= k <= n_total - 1:
            raise UndersizedClusterError(f"k={k} needs at least {k + 1} points")
        log_eps = np.log(table.distances[:, k - 1])
        n = n_total
    else:
        subset = np.asarray(subset, dtype=np.intp)
        n = subset.shape[0]
        if n < k + 1:
            raise UndersizedClusterError(
                f"subset of size {n} cannot support neighbor rank k={k}"
            )
        mask_labels = np.ones(n_total, dtype=np.int32)
        mask_labels[subset] = 0
        kth = kth_same_label_lsc(table.indices, table.rel_log_distances, mask_labels, k)
        log_eps = kth[subset] + table.log_max_distance[subset]
    value = math.log(n / k) + (d / n) * _fsum(log_eps) + bias_constant(k, n)
    return Score(value, "differential entropy")


def plug_in_entropy(part: Partition) -> Score:
    """Discrete entropy -sum (n_j/N) ln(n_j/N) of the cluster sizes."""
    n = part.n_samples
    p = part.counts[part.counts > 0] / n
    return Score(float(-(p * np.log(p)).sum()), "discrete entropy")


def conditional_data_entropy(table, part: Partition, k: int = 1, d: int | None = None) -> Score:
    """Cluster-size-weighted average of the per-cluster differential
    entropies, each estimated with neighbor ranks restricted to the cluster.

    Every nonempty cluster must have at least k+1 points; the ratio-based
    scores below handle smaller clusters through their fallback rule
    instead of this quantity.
    """
    d = _resolve_d(table, d)
    n = table.n_samples
    nonempty = _nonempty(part)
    if part.counts[nonempty].min() < k + 1:
        raise UndersizedClusterError(
            f"every cluster needs > k={k} points for the per-cluster estimator"
        )
    kth = kth_same_label_lsc(table.indices, table.rel_log_distances, part.labels, k)
    log_eps_bar = kth + table.log_max_distance
    per_cluster = np.bincount(part.labels, weights=log_eps_bar, minlength=part.n_labels)
    total = 0.0
    for j in nonempty:
        n_j = int(part.counts[j])
        h_j = math.log(n_j / k) + (d / n_j) * per_cluster[j] + bias_constant(k, n_j)
        total += (n_j / n) * h_j
    return Score(total, "conditional")


def consistency_violation(table, part: Partition, k: int = 1, d: int | None = None) -> Score:
    """Defect of the coarse-graining identity on estimated entropies:
    H(labels) + H(data | labels) - H(data).

    Zero for the identity coarse-graining; near zero when every point's k
    nearest neighbors share its label; large when the partition cuts
    through dense regions.
    """
    h_y = plug_in_entropy(part).value
    h_xy = conditional_data_entropy(table, part, k, d).value
    h_x = kl_entropy(table, None, k, d).value
    return Score(h_y + h_xy - h_x, "cv")


def _weighted_uncertainty(table, part: Partition, weights: np.ndarray, d: int) -> float:
    """(d/N) * sum over points of rank-weighted log(restricted/unrestricted)
    neighbor distance ratios, with the undersized-cluster fallback.

    Works on row-relative log distances: the restricted distance at
    same-label rank m contributes ``lsc`` at its position, the unrestricted
    rank-m distance contributes ``lsc[:, m-1]``, and fallback ranks
    contribute the row maximum whose relative log is exactly zero. Each
    point's contribution is a difference of the two weighted sums, so the
    result is exactly nonnegative and exactly scale-invariant.
    """
    n = table.n_samples
    lsc = table.rel_log_distances
    base_cache = table._cache.setdefault("base_weighted", {})
    key = weights.tobytes()
    base = base_cache.get(key)
    if base is None:
        base = lsc @ weights
        base_cache[key] = base
    restricted = weighted_same_label_lsc(table.indices, lsc, part.labels, weights)
    return (d / n) * _fsum(restricted - base)


def label_uncertainty_k(
    table,
    part: Partition,
    k: int = 1,
    d: int | None = None,
    include_constant: bool = False,
) -> Score:
    """Estimated cluster-label uncertainty at a single neighbor rank:
    (d/N) * sum of log(restricted / unrestricted) k-th neighbor distances.

    Points in clusters with fewer than k other members fall back to the
    farthest-neighbor distance (maximal uncertainty with insufficient
    data). With ``include_constant`` the exact small-sample constant
    sum_j (n_j/N) c_{k,n_j} - c_{k,N} is added, making the value equal to
    ``consistency_violation`` whenever every cluster has more than k
    points; clusters at or below size k contribute zero to the constant
    since no per-cluster estimate exists for them. Without the constant
    the value is nonnegative by construction.
    """
    d = _resolve_d(table, d)
    n = table.n_samples
    if not 1 <= k <= n - 1:
        raise ValueError(f"neighbor rank k={k} out of range")
    lsc = table.rel_log_distances
    kth = kth_same_label_lsc(table.indices, lsc, part.labels, k)
    value = (d / n) * _fsum(kth - lsc[:, k - 1])
    if include_constant:
        const = -bias_constant(k, n)
        for j in _nonempty(part):
            n_j = int(part.counts[j])
            if n_j > k:
                const += (n_j / n) * bias_constant(k, n_j)
        value += const
    return Score(value, "cv")


def resampled_label_uncertainty(
    table, part: Partition, k: int = 1, d: int | None = None, alpha: float = 0.0
) -> Score:
    """Expected label uncertainty when each point is kept independently
    with probability 1 - alpha.

    The k-th surviving neighbor corresponds to original rank m with
    negative-binomial probability, so the expectation is a rank-weighted
    sum of the same log-distance ratios; at alpha = 0 it reduces exactly
    to ``label_uncertainty_k``. The outer sum runs over all N original
    points, truncated at rank N-1.
    """
    d = _resolve_d(table, d)
    weights = resampled_rank_weights(k, table.n_samples, alpha)
    return Score(_weighted_uncertainty(table, part, weights, d), "cv")


def total_label_uncertainty(
    table, part: Partition, k: int = 1, d: int | None = None
) -> Score:
    """Label uncertainty integrated over all resampling retention rates.

    The integral collapses to rank weights k/(m(m+1)): every neighbor rank
    contributes, heavily discounted with rank, so the score stays
    responsive to cluster structure at any sample size. Nonnegative, since
    the restricted distance at a rank can never be smaller than the
    unrestricted one.
    """
    d = _resolve_d(table, d)
    weights = total_rank_weights(k, table.n_samples)
    return Score(_weighted_uncertainty(table, part, weights, d), "cv")


def cvr(table, part: Partition, k: int = 1, d: int | None = None) -> Score:
    """Ratio of total label uncertainty to label entropy: a unit-free
    partition quality score on a zero-to-one scale (lower is better).

    Undefined for partitions with fewer than two nonempty clusters (0/0);
    those are rejected rather than scored.
    """
    if part.n_nonempty < 2:
        raise UndefinedScoreError(
            "uncertainty ratio is undefined for a single-cluster partition (0/0)"
        )
    h_y = plug_in_entropy(part).value
    numerator = total_label_uncertainty(table, part, k, d).value
    return Score(numerator / h_y, "cvr")
