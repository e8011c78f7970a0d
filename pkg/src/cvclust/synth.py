"""Synthetic benchmark distributions and one-parameter partition scans.

Two generative families: a one-dimensional mixture of two uniform segments
separated by a gap, and a two-dimensional uniform density on a disk plus a
concentric annulus. Both come with their natural one-parameter partition
families (split at a threshold; split at a radius), which is what the
objective-comparison experiments sweep.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .baselines import ObjectiveKind, mi_objective, nic_objective
from .data import Dataset, Partition, SeedSpec
from .errors import UndefinedScoreError, UndersizedClusterError
from .estimators import cvr
from .neighbors import NeighborTable, build_neighbor_table

__all__ = [
    "TwoUniformSpec",
    "DiskAnnulusSpec",
    "ScanResult",
    "sample_two_uniform",
    "sample_disk_annulus",
    "threshold_partition",
    "radial_partition",
    "evaluate_objective",
    "scan_threshold",
    "scan_radius",
]


@dataclass(frozen=True)
class TwoUniformSpec:
    """Mixture of uniform densities on [0, width_a] and
    [width_a + gap, width_a + gap + width_b], with segment masses
    proportional to segment widths (constant density overall)."""

    width_a: float = 1.0
    gap: float = 0.5
    width_b: float = 2.0

    def __post_init__(self):
        if not (self.width_a > 0 and self.width_b > 0 and self.gap >= 0):
            raise ValueError("need width_a > 0, width_b > 0, gap >= 0")

    @property
    def mass_a(self) -> float:
        return self.width_a / (self.width_a + self.width_b)

    @property
    def gap_interval(self) -> tuple[float, float]:
        return (self.width_a, self.width_a + self.gap)

    def natural_threshold(self) -> float:
        """Midpoint of the gap: splits the two segments."""
        return self.width_a + self.gap / 2.0

    def equal_mass_threshold(self) -> float:
        """Point where the cumulative probability reaches one half."""
        half = (self.width_a + self.width_b) / 2.0
        if half <= self.width_a:
            return half
        return self.gap + half


@dataclass(frozen=True)
class DiskAnnulusSpec:
    """Uniform density over a disk of radius r_a plus the annulus between
    radii r_b and r_c, with 0 < r_a < r_b < r_c."""

    r_a: float = 1.1
    r_b: float = 1.4
    r_c: float = 3.5

    def __post_init__(self):
        if not 0 < self.r_a < self.r_b < self.r_c:
            raise ValueError("need 0 < r_a < r_b < r_c")

    @property
    def disk_mass(self) -> float:
        return self.r_a**2 / (self.r_a**2 + self.r_c**2 - self.r_b**2)

    def equal_area_radius(self) -> float:
        """Radius splitting the support into equal probability masses."""
        total = self.r_a**2 + self.r_c**2 - self.r_b**2
        return float(np.sqrt(total / 2.0 - self.r_a**2 + self.r_b**2))


def sample_two_uniform(spec: TwoUniformSpec, n: int, seed: SeedSpec) -> Dataset:
    """Draw n points; ground truth labels the segment (0 = first)."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = seed.generator()
    in_b = rng.random(n) >= spec.mass_a
    pos = rng.random(n)
    x = np.where(
        in_b,
        spec.width_a + spec.gap + pos * spec.width_b,
        pos * spec.width_a,
    )
    return Dataset(points=x[:, None], ground_truth=_as_labels(in_b))


def sample_disk_annulus(spec: DiskAnnulusSpec, n: int, seed: SeedSpec) -> Dataset:
    """Area-uniform draw; ground truth labels the region (0 = disk).

    Radius comes from inverse-CDF sampling in squared radius, angle is
    uniform.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rng = seed.generator()
    in_annulus = rng.random(n) >= spec.disk_mass
    u = rng.random(n)
    r_sq = np.where(
        in_annulus,
        spec.r_b**2 + u * (spec.r_c**2 - spec.r_b**2),
        u * spec.r_a**2,
    )
    r = np.sqrt(r_sq)
    theta = rng.random(n) * 2.0 * np.pi
    pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    return Dataset(points=pts, ground_truth=_as_labels(in_annulus))


def _as_labels(flags: np.ndarray) -> np.ndarray | None:
    # Degenerate draws where one component is empty carry no usable truth.
    if flags.all() or not flags.any():
        return None
    return flags.astype(np.int32)


def threshold_partition(ds: Dataset, t: float) -> Partition:
    """Label 0 iff x <= t (1-D data only)."""
    if ds.n_dims != 1:
        raise ValueError("threshold partitions require 1-D data")
    return Partition.from_labels((ds.points[:, 0] > t).astype(np.int32), n_labels=2)


def radial_partition(ds: Dataset, r: float) -> Partition:
    """Label 0 iff the Euclidean radius is <= r (2-D data only).

    The split geometry is the generative one (Euclidean), independent of
    the max norm the estimators use internally.
    """
    if ds.n_dims != 2:
        raise ValueError("radial partitions require 2-D data")
    radius = np.hypot(ds.points[:, 0], ds.points[:, 1])
    return Partition.from_labels((radius > r).astype(np.int32), n_labels=2)


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Objective values over a one-parameter partition family.

    ``scores`` holds NaN where the partition was invalid for the objective
    (single cluster, or a cluster too small for the neighbor rank);
    ``arg_opt`` is the parameter of the best valid score, ties to the
    smallest parameter.
    """

    parameters: np.ndarray
    scores: np.ndarray
    valid: np.ndarray
    objective: ObjectiveKind
    arg_opt: float | None
    opt_score: float | None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["parameter", "score", "valid"])
            for p, s, v in zip(self.parameters, self.scores, self.valid):
                writer.writerow([repr(float(p)), repr(float(s)) if v else "", int(v)])


def evaluate_objective(
    objective: ObjectiveKind,
    table: NeighborTable,
    part: Partition,
    k: int | None = None,
    d: int | None = None,
) -> float:
    """Score one partition under one objective (raises when invalid)."""
    if objective is ObjectiveKind.CVR:
        return cvr(table, part, k=1 if k is None else k, d=d).value
    if objective is ObjectiveKind.MI:
        return mi_objective(table, part, k=3 if k is None else k, d=d).value
    if objective is ObjectiveKind.NIC:
        return nic_objective(table, part, d=d).value
    raise ValueError(f"unknown objective {objective!r}")


def _scan(table, parameters, partitions, objective, k, d) -> ScanResult:
    scores = np.full(len(parameters), np.nan)
    valid = np.zeros(len(parameters), dtype=bool)
    for idx, part in enumerate(partitions):
        try:
            scores[idx] = evaluate_objective(objective, table, part, k, d)
            valid[idx] = True
        except (UndefinedScoreError, UndersizedClusterError):
            continue
    if valid.any():
        candidates = np.where(valid, scores, np.nan)
        if objective.direction == "min":
            best = int(np.nanargmin(candidates))
        else:
            best = int(np.nanargmax(candidates))
        arg_opt, opt_score = float(parameters[best]), float(scores[best])
    else:
        arg_opt = opt_score = None
    return ScanResult(
        parameters=np.asarray(parameters, dtype=np.float64),
        scores=scores,
        valid=valid,
        objective=objective,
        arg_opt=arg_opt,
        opt_score=opt_score,
    )


def scan_threshold(
    ds: Dataset,
    objective: ObjectiveKind,
    k: int | None = None,
    d: int | None = None,
    table: NeighborTable | None = None,
) -> ScanResult:
    """Sweep all N-1 midpoints between consecutive sorted samples: the
    complete family of threshold splits of 1-D data."""
    if ds.n_dims != 1:
        raise ValueError("threshold scans require 1-D data")
    if ds.n_samples < 4:
        raise ValueError("threshold scans need at least 4 samples")
    if table is None:
        table = build_neighbor_table(ds)
    xs = np.sort(ds.points[:, 0])
    thresholds = (xs[:-1] + xs[1:]) / 2.0
    partitions = (threshold_partition(ds, t) for t in thresholds)
    return _scan(table, thresholds, partitions, objective, k, d)


def scan_radius(
    ds: Dataset,
    objective: ObjectiveKind,
    radii: np.ndarray | None = None,
    k: int | None = None,
    d: int | None = None,
    table: NeighborTable | None = None,
) -> ScanResult:
    """Sweep radial splits over a radius grid (default: 200 evenly spaced
    radii up to the largest sample radius)."""
    if ds.n_dims != 2:
        raise ValueError("radial scans require 2-D data")
    if radii is None:
        r_max = float(np.hypot(ds.points[:, 0], ds.points[:, 1]).max())
        radii = np.linspace(0.0, r_max, 200)
    radii = np.asarray(radii, dtype=np.float64)
    if radii.size == 0:
        raise ValueError("radius grid is empty")
    if table is None:
        table = build_neighbor_table(ds)
    partitions = (radial_partition(ds, r) for r in radii)
    return _scan(table, radii, partitions, objective, k, d)
