"""Dataset and partition containers, CSV ingestion, standardization, and
deterministic seeded randomness.

All randomness in the package flows through :class:`SeedSpec`; there is no
hidden global RNG state. Datasets and partitions are immutable after
construction (their arrays are marked read-only), so they are safe for
unrestricted concurrent reads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError

__all__ = [
    "SeedSpec",
    "Dataset",
    "Partition",
    "load_csv",
    "write_csv",
    "standardize",
    "jitter",
]


@dataclass(frozen=True)
class SeedSpec:
    """A root seed plus a derivation path identifying an independent stream.

    Identical ``(root, path)`` pairs always yield the identical stream;
    distinct paths yield statistically independent streams.
    """

    root: int
    path: tuple[int, ...] = ()

    def spawn(self, *steps: int) -> "SeedSpec":
        """Derive a sub-stream by extending the derivation path."""
        return SeedSpec(self.root, self.path + tuple(int(s) for s in steps))

    def generator(self) -> np.random.Generator:
        """Instantiate the RNG for this stream."""
        seq = np.random.SeedSequence(self.root, spawn_key=self.path)
        return np.random.default_rng(seq)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable N x d sample matrix with optional ground-truth labels."""

    points: np.ndarray
    ground_truth: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise DataFormatError("points must be a 2-D array")
        if pts.shape[0] < 2:
            raise DataFormatError("a dataset needs at least 2 samples")
        if pts.shape[1] < 1:
            raise DataFormatError("a dataset needs at least 1 feature")
        if not np.all(np.isfinite(pts)):
            raise DataFormatError("points contain non-finite coordinates")
        object.__setattr__(self, "points", _readonly(pts))
        if self.ground_truth is not None:
            gt = np.asarray(self.ground_truth, dtype=np.int32)
            if gt.shape != (pts.shape[0],):
                raise DataFormatError("ground_truth length must match n_samples")
            if gt.min() < 0:
                raise DataFormatError("ground_truth labels must be nonnegative")
            n_labels = int(gt.max()) + 1
            if len(np.unique(gt)) != n_labels:
                raise DataFormatError("ground_truth labels must cover 0..l-1")
            object.__setattr__(self, "ground_truth", _readonly(gt))

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]

    @property
    def n_dims(self) -> int:
        return self.points.shape[1]

    def ground_truth_partition(self) -> "Partition":
        if self.ground_truth is None:
            raise ValueError("dataset has no ground-truth labels")
        return Partition.from_labels(self.ground_truth)


@dataclass(frozen=True, eq=False)
class Partition:
    """A cluster label in ``{0..n_labels-1}`` for each sample.

    Labels with zero members are permitted (``counts`` may contain zeros);
    scores that require at least two nonempty clusters check ``counts``.
    """

    labels: np.ndarray
    n_labels: int
    counts: np.ndarray = field(compare=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int32)
        if labels.ndim != 1 or labels.size == 0:
            raise DataFormatError("labels must be a nonempty 1-D sequence")
        if self.n_labels < 1:
            raise DataFormatError("n_labels must be >= 1")
        if labels.min() < 0 or labels.max() >= self.n_labels:
            raise DataFormatError("labels must lie in {0..n_labels-1}")
        counts = np.bincount(labels, minlength=self.n_labels).astype(np.int64)
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "counts", _readonly(counts))

    @classmethod
    def from_labels(cls, labels, n_labels: int | None = None) -> "Partition":
        labels = np.asarray(labels, dtype=np.int32)
        if n_labels is None:
            n_labels = int(labels.max()) + 1 if labels.size else 1
        return cls(labels=labels, n_labels=n_labels, counts=None)

    @property
    def n_samples(self) -> int:
        return self.labels.shape[0]

    @property
    def n_nonempty(self) -> int:
        return int(np.count_nonzero(self.counts))

    def canonical_labels(self) -> np.ndarray:
        """Relabel to first-appearance order; identical clusterings map to
        identical arrays regardless of label names."""
        return _factorize(self.labels)[0]


def _factorize(values) -> tuple[np.ndarray, list]:
    """Map values to integer codes in first-appearance order."""
    codes = np.empty(len(values), dtype=np.int32)
    seen: dict = {}
    for i, v in enumerate(values):
        key = v.item() if isinstance(v, np.generic) else v
        if key not in seen:
            seen[key] = len(seen)
        codes[i] = seen[key]
    return codes, list(seen)


def _resolve_label_column(header: list[str] | None, width: int, selector) -> int:
    if isinstance(selector, str):
        if header is None:
            raise DataFormatError(
                f"label column {selector!r} given by name but file has no header"
            )
        try:
            return header.index(selector)
        except ValueError:
            raise DataFormatError(f"label column {selector!r} not in header") from None
    idx = int(selector)
    if not 0 <= idx < width:
        raise DataFormatError(f"label column index {idx} out of range for width {width}")
    return idx


def load_csv(path, label_column=None, has_header: bool = False) -> Dataset:
    """Read a comma-separated file of finite reals into a Dataset.

    ``label_column`` selects an optional class column by 0-based index or,
    when ``has_header`` is set, by name; its values are factorized to
    ``{0..l-1}`` in first-appearance order and stored as ground truth.
    """
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    header = None
    if has_header:
        if not rows:
            raise DataFormatError(f"{path}: empty file")
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        label_idx = _resolve_label_column(header, width, label_column)

    points = []
    raw_labels = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DataFormatError(
                f"{path}: ragged row {lineno} (expected {width} cells, got {len(row)})"
            )
        vals = []
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                x = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}: non-numeric cell {cell!r} at row {lineno}"
                ) from None
            if not np.isfinite(x):
                raise DataFormatError(f"{path}: non-numeric cell {cell!r} at row {lineno}")
            vals.append(x)
        points.append(vals)

    gt = _factorize(raw_labels)[0] if label_idx is not None else None
    return Dataset(points=np.array(points, dtype=np.float64), ground_truth=gt)


def write_csv(ds: Dataset, path, label_header: str = "label") -> None:
    """Serialize a dataset; full-precision floats so a reload round-trips."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if ds.ground_truth is not None:
            writer.writerow([f"x{j}" for j in range(ds.n_dims)] + [label_header])
            for row, lab in zip(ds.points, ds.ground_truth):
                writer.writerow([repr(float(v)) for v in row] + [int(lab)])
        else:
            for row in ds.points:
                writer.writerow([repr(float(v)) for v in row])


def standardize(ds: Dataset) -> Dataset:
    """Shift/scale each feature to mean 0 and standard deviation 1.

    The population convention (denominator N) is used, so the two-point
    feature {0, 2} maps to {-1, 1}. Constant features are mapped to zeros.
    """
    pts = ds.points
    mean = pts.mean(axis=0)
    sd = pts.std(axis=0)  # ddof=0
    centered = pts - mean
    out = np.divide(centered, sd, out=np.zeros_like(centered), where=sd > 0)
    return Dataset(points=out, ground_truth=ds.ground_truth)


def jitter(ds: Dataset, seed: SeedSpec, magnitude: float = 1e-10) -> Dataset:
    """Perturb every coordinate by seeded uniform noise in [-magnitude, +magnitude].

    Breaks exact coordinate duplicates, which would otherwise give zero
    nearest-neighbor distances and undefined log-distance scores.
    """
    if not magnitude > 0:
        raise ValueError("jitter magnitude must be > 0")
    rng = seed.generator()
    noise = rng.uniform(-magnitude, magnitude, size=ds.points.shape)
    return Dataset(points=ds.points + noise, ground_truth=ds.ground_truth)
