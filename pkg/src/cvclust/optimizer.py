"""Heuristic partition search: neighbor-rank affinity, Gram-matrix
relaxation, random-hyperplane rounding, uncertainty-ratio ranking, and
multiway assembly.

The relaxation places a unit vector on every point and maximizes the
affinity-weighted sum of inner products; rounding by a random hyperplane
turns an embedding into a binary partition. Candidates generated this way
tend to cut only through sparse regions, which is exactly where the
uncertainty ratio is small, so ranking a couple hundred of them and
refining covers the practically relevant search space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bench import rand_index
from .data import Dataset, Partition, SeedSpec, _factorize, jitter
from .errors import CandidatesExhaustedWarning, UndefinedScoreError
from .estimators import Score, cvr
from .neighbors import NeighborTable, build_neighbor_table

__all__ = [
    "AffinityMatrix",
    "EmbeddingVectors",
    "ClusterConfig",
    "build_affinity",
    "solve_gram_relaxation",
    "discrete_objective",
    "round_hyperplane",
    "generate_candidates",
    "select_best_cvr",
    "refine_multiway",
    "cluster",
]


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetrized neighbor-rank adjacency with a uniform negative shift.

    Entry (i, j) starts from 1/(k(k+1)) when j is the k-th nearest neighbor
    of i (up to ``k_max``), is symmetrized as (A + A^T)/2, then every entry
    is shifted by -beta so that spreading the embedding apart pays off.
    The diagonal is zero before the shift.
    """

    matrix: np.ndarray
    beta: float
    k_max: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class EmbeddingVectors:
    """Unit vectors produced by the relaxation, one per point, plus the
    per-sweep objective values (nondecreasing by construction)."""

    vectors: np.ndarray
    objective_history: tuple[float, ...]

    @property
    def objective(self) -> float:
        return self.objective_history[-1]

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]


def build_affinity(table: NeighborTable, k_max: int = 10, beta: float | None = None) -> AffinityMatrix:
    """Build the shifted symmetric adjacency; beta defaults to
    1/(k_max(k_max+1)), the smallest retained rank weight."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    n = table.n_samples
    k_max = min(k_max, n - 1)
    if beta is None:
        beta = 1.0 / (k_max * (k_max + 1))
    a = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k_max)
    cols = table.indices[:, :k_max].ravel()
    vals = np.tile(
        1.0 / (np.arange(1, k_max + 1) * np.arange(2, k_max + 2)), n
    )
    a[rows, cols] = vals
    sym = (a + a.T) / 2.0 - beta
    return AffinityMatrix(matrix=sym, beta=float(beta), k_max=int(k_max))


def default_rank(n: int) -> int:
    """Embedding rank ceil(sqrt(2N)) capped at 32: above the rank barrier
    for typical N, so coordinate ascent rarely stalls in spurious optima."""
    return max(2, min(32, math.ceil(math.sqrt(2.0 * n))))


def solve_gram_relaxation(
    aff: AffinityMatrix,
    rank: int | None = None,
    seed: SeedSpec = SeedSpec(0),
    sweeps: int = 500,
    tol: float = 1e-7,
) -> EmbeddingVectors:
    """Maximize sum_ij A_ij <y_i, y_j> over unit vectors by cyclic
    coordinate updates y_i <- normalize(sum_j A_ij y_j).

    Each update is the exact maximizer given the other vectors, so the
    objective never decreases; iteration stops when a full sweep improves
    it by less than ``tol`` relative, or at the sweep cap.
    """
    a = aff.matrix
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("affinity matrix must be square")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("affinity matrix must be symmetric")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    n = a.shape[0]
    if rank is None:
        rank = default_rank(n)
    if rank < 2:
        raise ValueError("embedding rank must be >= 2")
    rng = seed.generator()
    y = rng.standard_normal((n, rank))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    diag = np.diag(a).copy()

    def objective() -> float:
        return float(np.sum((a @ y) * y))

    history = [objective()]
    for _ in range(sweeps):
        for i in range(n):
            g = a[i] @ y - diag[i] * y[i]
            norm = np.linalg.norm(g)
            if norm > 0.0:
                y[i] = g / norm
        history.append(objective())
        gain = history[-1] - history[-2]
        if gain < -1e-8 * max(1.0, abs(history[-2])):
            raise RuntimeError("coordinate ascent objective decreased")
        if gain < tol * max(1.0, abs(history[-2])):
            break
    y.flags.writeable = False
    return EmbeddingVectors(vectors=y, objective_history=tuple(history))


def discrete_objective(aff: AffinityMatrix, part: Partition) -> float:
    """Value of the relaxation objective at a binary partition's +-1 signs."""
    signs = np.where(part.labels == part.labels[0], 1.0, -1.0)
    return float(signs @ aff.matrix @ signs)


def round_hyperplane(emb: EmbeddingVectors, seed: SeedSpec) -> Partition:
    """Binary partition from one random hyperplane: labels by the sign of
    the projection onto a random unit vector (zero counts as label 1)."""
    rng = seed.generator()
    u = rng.standard_normal(emb.rank)
    u /= np.linalg.norm(u)
    labels = (emb.vectors @ u >= 0.0).astype(np.int32)
    return Partition.from_labels(labels, n_labels=2)


def generate_candidates(
    emb: EmbeddingVectors, n_candidates: int = 200, seed: SeedSpec = SeedSpec(0)
) -> list[Partition]:
    """Independent hyperplane roundings; duplicates are kept here and
    collapsed at ranking time."""
    if n_candidates < 1:
        raise ValueError("n_candidates must be >= 1")
    return [round_hyperplane(emb, seed.spawn(i)) for i in range(n_candidates)]


def _rank_candidates(table, candidates, k, d):
    """Deduplicate (up to relabeling), score, and sort candidates by their
    uncertainty ratio ascending; single-cluster candidates are dropped."""
    ranked = []
    seen = set()
    for idx, part in enumerate(candidates):
        key = part.canonical_labels().tobytes()
        if key in seen:
            continue
        seen.add(key)
        if part.n_nonempty < 2:
            continue
        ranked.append((cvr(table, part, k=k, d=d).value, idx, part))
    ranked.sort(key=lambda t: (t[0], t[1]))
    return ranked


def select_best_cvr(
    table, candidates, k: int = 1, d: int | None = None
) -> tuple[Partition, Score]:
    """The candidate with the lowest uncertainty ratio (ties by index)."""
    ranked = _rank_candidates(table, candidates, k, d)
    if not ranked:
        raise UndefinedScoreError("all candidate partitions are single-cluster")
    value, _, part = ranked[0]
    return part, Score(value, "cvr")


def _cross(current: Partition, other: Partition) -> Partition:
    """Cross-product refinement: points are co-clustered afterwards iff
    they are co-clustered in both inputs."""
    combined = current.labels.astype(np.int64) * other.n_labels + other.labels
    codes, _ = _factorize(combined)
    return Partition.from_labels(codes)


def _merge_pair(part: Partition, a: int, b: int) -> Partition:
    labels = np.where(part.labels == b, a, part.labels)
    codes, _ = _factorize(labels)
    return Partition.from_labels(codes)


def refine_multiway(
    table,
    base: Partition,
    ranked_candidates,
    target_clusters: int,
    k: int = 1,
    d: int | None = None,
    top: int = 25,
) -> Partition:
    """Grow the base partition to the requested cluster count.

    Repeatedly crosses the current partition with one of the ``top``
    best-scoring remaining candidates, choosing the one with the smallest
    Rand-index overlap against the current partition (a near-duplicate
    refines nothing). Overshoot is reduced by greedily merging whichever
    cluster pair yields the lowest uncertainty ratio until the count is
    exact. Running out of candidates warns and returns the best effort.
    """
    if target_clusters < 2:
        raise ValueError("target_clusters must be >= 2")
    current = base
    pool = list(ranked_candidates)
    while current.n_nonempty < target_clusters:
        if not pool:
            warnings.warn(
                f"candidate partitions exhausted at {current.n_nonempty} clusters "
                f"(target {target_clusters})",
                CandidatesExhaustedWarning,
                stacklevel=2,
            )
            break
        window = pool[:top]
        overlaps = [rand_index(cand, current) for cand in window]
        pick = int(np.argmin(overlaps))
        chosen = window[pick]
        del pool[pick]
        crossed = _cross(current, chosen)
        if crossed.n_nonempty > current.n_nonempty:
            current = crossed
    while current.n_nonempty > target_clusters:
        nonempty = np.flatnonzero(current.counts)
        best = None
        for ai in range(len(nonempty)):
            for bi in range(ai + 1, len(nonempty)):
                merged = _merge_pair(current, int(nonempty[ai]), int(nonempty[bi]))
                value = cvr(table, merged, k=k, d=d).value
                if best is None or value < best[0]:
                    best = (value, merged)
        current = best[1]
    return Partition.from_labels(current.canonical_labels())


@dataclass(frozen=True)
class ClusterConfig:
    """End-to-end pipeline parameters; every field has the module default."""

    seed: SeedSpec = SeedSpec(0)
    k_max: int = 10
    beta: float | None = None  # None -> 1/(k_max(k_max+1))
    n_candidates: int = 200
    rank: int | None = None  # None -> ceil(sqrt(2N)) capped at 32
    k: int = 1
    jitter_magnitude: float = 1e-10
    sweeps: int = 500
    tol: float = 1e-7
    top_refine: int = 25


def cluster(
    ds: Dataset, target_clusters: int, config: ClusterConfig | None = None
) -> tuple[Partition, Score]:
    """Full pipeline: jitter, neighbor table, affinity, relaxation,
    candidate rounding, ranking, multiway refinement.

    Deterministic given the config seed. Returns the final partition and
    its uncertainty ratio.
    """
    if ds.n_samples < 4:
        raise ValueError("clustering needs at least 4 samples")
    if config is None:
        config = ClusterConfig()
    if config.jitter_magnitude > 0:
        ds = jitter(ds, config.seed.spawn(0), config.jitter_magnitude)
    table = build_neighbor_table(ds)
    aff = build_affinity(table, k_max=config.k_max, beta=config.beta)
    emb = solve_gram_relaxation(
        aff,
        rank=config.rank,
        seed=config.seed.spawn(1),
        sweeps=config.sweeps,
        tol=config.tol,
    )
    candidates = generate_candidates(emb, config.n_candidates, config.seed.spawn(2))
    ranked = _rank_candidates(table, candidates, config.k, None)
    if not ranked:
        raise UndefinedScoreError("all candidate partitions are single-cluster")
    base = ranked[0][2]
    rest = [part for _, _, part in ranked[1:]]
    final = refine_multiway(
        table,
        base,
        rest,
        target_clusters,
        k=config.k,
        top=config.top_refine,
    )
    return final, cvr(table, final, k=config.k)
