"""Partition agreement scoring, experiment drivers, and report emission.

Experiments are deterministic given their seed: repetition r of experiment
stage s always draws from the sub-stream ``seed.spawn(s, r)``, and
aggregates are computed in a fixed order from the per-repetition records,
so reruns (and parallel runs) reproduce results exactly.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset, Partition, SeedSpec, jitter, load_csv, standardize
from .errors import (
    CandidatesExhaustedWarning,
    DataFormatError,
    UndefinedScoreError,
    UndersizedClusterError,
)
from .baselines import ObjectiveKind, mi_objective
from .estimators import cvr
from .neighbors import build_neighbor_table
from .synth import (
    DiskAnnulusSpec,
    TwoUniformSpec,
    sample_disk_annulus,
    sample_two_uniform,
    scan_radius,
    scan_threshold,
    threshold_partition,
)

__all__ = ["rand_index", "ExperimentReport", "run_benchmark", "BENCHMARKS"]


def _as_label_array(p) -> np.ndarray:
    if isinstance(p, Partition):
        return p.labels
    return np.asarray(p)


def rand_index(p, q) -> float:
    """Fraction of point pairs on which two partitions agree (co-clustered
    in both, or separated in both). Invariant under relabeling; 1.0 iff
    the partitions are identical up to label names.
    """
    a = _as_label_array(p)
    b = _as_label_array(q)
    if a.shape != b.shape:
        raise ValueError("partitions must have equal length")
    n = a.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points")
    _, a_codes = np.unique(a, return_inverse=True)
    _, b_codes = np.unique(b, return_inverse=True)
    n_b = int(b_codes.max()) + 1
    contingency = np.bincount(a_codes * n_b + b_codes)

    def pairs2(counts: np.ndarray) -> float:
        counts = counts.astype(np.float64)
        return float((counts * (counts - 1.0)).sum() / 2.0)

    total = n * (n - 1) / 2.0
    s_ab = pairs2(contingency)
    s_a = pairs2(np.bincount(a_codes))
    s_b = pairs2(np.bincount(b_codes))
    return (total + 2.0 * s_ab - s_a - s_b) / total


@dataclass(frozen=True)
class ExperimentReport:
    """Structured experiment output: config echo, one record per
    repetition, and aggregates that recompute exactly from the records."""

    name: str
    config: dict
    records: list
    aggregates: dict
    duration_s: float

    def recompute_aggregates(self) -> dict:
        return _AGGREGATORS[self.name](self.records, self.config)

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "config": self.config,
            "records": self.records,
            "aggregates": self.aggregates,
            "duration_s": self.duration_s,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    def write_plot_csvs(self, outdir) -> list:
        """One CSV per curve; first line names the columns."""
        import csv
        import os

        paths = []
        for curve_name, header, rows in _CURVES[self.name](self.aggregates):
            path = os.path.join(outdir, f"{self.name}_{curve_name}.csv")
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(header)
                writer.writerows(rows)
            paths.append(path)
        return paths


def _map_reps(fn, n_reps: int, workers: int):
    """Run repetitions (optionally threaded); results in repetition order."""
    if workers <= 1:
        return [fn(r) for r in range(n_reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_reps)))


# --- two-segment mixture: estimated MI of natural vs equal-mass split ----


def _fig2_defaults() -> dict:
    return {
        "n_values": [30, 60, 120, 250, 500, 1000, 2000],
        "reps": 50,
        "k": 3,
        "width_a": 1.0,
        "gap": 0.5,
        "width_b": 2.0,
        "workers": 1,
    }


def _run_fig2(config: dict, seed: SeedSpec) -> list:
    spec = TwoUniformSpec(config["width_a"], config["gap"], config["width_b"])
    t_nat = spec.natural_threshold()
    t_eq = spec.equal_mass_threshold()
    k = config["k"]
    records = []
    for stage, n in enumerate(config["n_values"]):

        def one(rep: int, stage=stage, n=n):
            ds = sample_two_uniform(spec, n, seed.spawn(stage, rep))
            table = build_neighbor_table(ds)
            rec = {"n": n, "rep": rep, "valid": True}
            try:
                rec["mi_natural"] = mi_objective(
                    table, threshold_partition(ds, t_nat), k=k
                ).value
                rec["mi_equal"] = mi_objective(
                    table, threshold_partition(ds, t_eq), k=k
                ).value
            except UndersizedClusterError:
                rec.update(mi_natural=None, mi_equal=None, valid=False)
            return rec

        records.extend(_map_reps(one, config["reps"], config["workers"]))
    return records


def _agg_fig2(records: list, config: dict) -> dict:
    out = {}
    for n in config["n_values"]:
        rows = [r for r in records if r["n"] == n and r["valid"]]
        wins = [r["mi_natural"] > r["mi_equal"] for r in rows]
        out[str(n)] = {
            "n_valid": len(rows),
            "frac_natural_wins": float(np.mean(wins)) if rows else None,
            "mean_mi_natural": float(np.mean([r["mi_natural"] for r in rows])) if rows else None,
            "mean_mi_equal": float(np.mean([r["mi_equal"] for r in rows])) if rows else None,
        }
    return out


def _curves_fig2(agg: dict):
    header = ["n", "frac_natural_wins", "mean_mi_natural", "mean_mi_equal"]
    rows = [
        [n, v["frac_natural_wins"], v["mean_mi_natural"], v["mean_mi_equal"]]
        for n, v in agg.items()
    ]
    return [("mi_split_comparison", header, rows)]


# --- threshold scans of the uncertainty ratio over the mixture -----------


def _fig4_defaults() -> dict:
    return {
        "n_values": [30, 90],
        "reps": 50,
        "k": 1,
        "width_a": 1.0,
        "gap": 0.5,
        "width_b": 2.0,
        "workers": 1,
    }


def _run_fig4(config: dict, seed: SeedSpec) -> list:
    spec = TwoUniformSpec(config["width_a"], config["gap"], config["width_b"])
    lo, hi = spec.gap_interval
    records = []
    for stage, n in enumerate(config["n_values"]):

        def one(rep: int, stage=stage, n=n):
            ds = sample_two_uniform(spec, n, seed.spawn(stage, rep))
            scan = scan_threshold(ds, ObjectiveKind.CVR, k=config["k"])
            in_gap = (scan.parameters > lo) & (scan.parameters < hi) & scan.valid
            out_gap = ~in_gap & scan.valid
            rec = {
                "n": n,
                "rep": rep,
                "arg_min": scan.arg_opt,
                "arg_min_in_gap": bool(lo < scan.arg_opt < hi) if scan.arg_opt is not None else False,
            }
            if in_gap.any() and out_gap.any():
                best_in = float(np.nanmin(np.where(in_gap, scan.scores, np.nan)))
                best_out = float(np.nanmin(np.where(out_gap, scan.scores, np.nan)))
                rec["separation"] = best_out / best_in if best_in > 0 else None
            else:
                rec["separation"] = None
            return rec

        records.extend(_map_reps(one, config["reps"], config["workers"]))
    return records


def _agg_fig4(records: list, config: dict) -> dict:
    out = {}
    for n in config["n_values"]:
        rows = [r for r in records if r["n"] == n]
        seps = [r["separation"] for r in rows if r["separation"] is not None]
        out[str(n)] = {
            "frac_arg_min_in_gap": float(np.mean([r["arg_min_in_gap"] for r in rows])),
            "mean_separation": float(np.mean(seps)) if seps else None,
            "n_with_separation": len(seps),
        }
    return out


def _curves_fig4(agg: dict):
    header = ["n", "frac_arg_min_in_gap", "mean_separation"]
    rows = [[n, v["frac_arg_min_in_gap"], v["mean_separation"]] for n, v in agg.items()]
    return [("threshold_scan", header, rows)]


# --- radial scans: best radius per objective ------------------------------


_RADIAL_OBJECTIVES = [ObjectiveKind.CVR, ObjectiveKind.MI, ObjectiveKind.NIC]


def _fig6_defaults() -> dict:
    return {
        "n_values": [2**e for e in range(6, 12)],
        "reps": 20,
        "r_a": 1.1,
        "r_b": 1.4,
        "r_c": 3.5,
        "grid_size": 200,
        "k_cvr": 1,
        "k_mi": 3,
        "workers": 1,
    }


def _radial_rep(spec: DiskAnnulusSpec, n: int, rep_seed: SeedSpec, config: dict) -> dict:
    ds = sample_disk_annulus(spec, n, rep_seed)
    table = build_neighbor_table(ds)
    radii = np.linspace(0.0, spec.r_c, config["grid_size"])
    out = {}
    for obj in _RADIAL_OBJECTIVES:
        k = {"cvr": config["k_cvr"], "mi": config["k_mi"], "nic": None}[obj.value]
        scan = scan_radius(ds, obj, radii=radii, k=k, table=table)
        out[f"r_star_{obj.value}"] = scan.arg_opt
    return out


def _run_fig6(config: dict, seed: SeedSpec) -> list:
    spec = DiskAnnulusSpec(config["r_a"], config["r_b"], config["r_c"])
    records = []
    for stage, n in enumerate(config["n_values"]):

        def one(rep: int, stage=stage, n=n):
            rec = {"n": n, "rep": rep}
            rec.update(_radial_rep(spec, n, seed.spawn(stage, rep), config))
            return rec

        records.extend(_map_reps(one, config["reps"], config["workers"]))
    return records


def _r_star_stats(rows: list, key: str) -> dict:
    vals = [r[key] for r in rows if r[key] is not None]
    if not vals:
        return {"mean": None, "std": None, "n_valid": 0}
    return {
        "mean": float(np.mean(vals)),
        "std": float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0,
        "n_valid": len(vals),
    }


def _agg_fig6(records: list, config: dict) -> dict:
    out = {}
    for n in config["n_values"]:
        rows = [r for r in records if r["n"] == n]
        out[str(n)] = {
            obj.value: _r_star_stats(rows, f"r_star_{obj.value}")
            for obj in _RADIAL_OBJECTIVES
        }
    return out


def _curves_fig6(agg: dict):
    curves = []
    for obj in _RADIAL_OBJECTIVES:
        header = ["n", "r_star_mean", "r_star_std", "n_valid"]
        rows = [
            [n, v[obj.value]["mean"], v[obj.value]["std"], v[obj.value]["n_valid"]]
            for n, v in agg.items()
        ]
        curves.append((f"r_star_{obj.value}", header, rows))
    return curves


def _fig7_defaults() -> dict:
    return {
        "r_a_values": [0.5, 0.9, 1.3, 1.7, 2.1, 2.5, 2.9],
        "gap_width": 0.3,
        "r_c": 3.5,
        "n": 2**11,
        "reps": 20,
        "grid_size": 200,
        "k_cvr": 1,
        "k_mi": 3,
        "workers": 1,
    }


def _run_fig7(config: dict, seed: SeedSpec) -> list:
    records = []
    for stage, r_a in enumerate(config["r_a_values"]):
        spec = DiskAnnulusSpec(r_a, r_a + config["gap_width"], config["r_c"])

        def one(rep: int, stage=stage, spec=spec, r_a=r_a):
            rec = {"r_a": r_a, "rep": rep}
            rec.update(_radial_rep(spec, config["n"], seed.spawn(stage, rep), config))
            return rec

        records.extend(_map_reps(one, config["reps"], config["workers"]))
    return records


def _agg_fig7(records: list, config: dict) -> dict:
    out = {}
    for r_a in config["r_a_values"]:
        rows = [r for r in records if r["r_a"] == r_a]
        entry = {}
        for obj in _RADIAL_OBJECTIVES:
            stats = _r_star_stats(rows, f"r_star_{obj.value}")
            vals = [
                r[f"r_star_{obj.value}"]
                for r in rows
                if r[f"r_star_{obj.value}"] is not None
            ]
            stats["frac_in_correct_range"] = (
                float(np.mean([r_a < v < r_a + config["gap_width"] for v in vals]))
                if vals
                else None
            )
            entry[obj.value] = stats
        out[str(r_a)] = entry
    return out


def _curves_fig7(agg: dict):
    curves = []
    for obj in _RADIAL_OBJECTIVES:
        header = ["r_a", "r_star_mean", "r_star_std", "frac_in_correct_range"]
        rows = [
            [
                r_a,
                v[obj.value]["mean"],
                v[obj.value]["std"],
                v[obj.value]["frac_in_correct_range"],
            ]
            for r_a, v in agg.items()
        ]
        curves.append((f"r_star_{obj.value}", header, rows))
    return curves


# --- real datasets: full pipeline vs ground truth -------------------------


def _uci_defaults() -> dict:
    return {
        "datasets": {},  # name -> {"path": ..., "label_column": ..., "has_header": ...}
        "standardize": True,
        "jitter": 1e-10,
        "k": 1,
        "k_max": 10,
        "beta": None,
        "n_candidates": 200,
        "rank": None,
        "workers": 1,
    }


def _run_uci(config: dict, seed: SeedSpec) -> list:
    from .optimizer import ClusterConfig, cluster  # deferred: optimizer imports bench

    if not config["datasets"]:
        raise DataFormatError(
            "uci benchmark needs dataset files: params={'datasets': {name: "
            "{'path': csv, 'label_column': col, 'has_header': bool}}}"
        )
    records = []
    for stage, (name, entry) in enumerate(sorted(config["datasets"].items())):
        ds = load_csv(
            entry["path"],
            label_column=entry.get("label_column", "label"),
            has_header=entry.get("has_header", True),
        )
        if ds.ground_truth is None:
            raise DataFormatError(f"{name}: dataset has no label column")
        if config["standardize"]:
            ds = standardize(ds)
        gt = ds.ground_truth_partition()
        ds_j = jitter(ds, seed.spawn(stage, 0), config["jitter"])
        table = build_neighbor_table(ds_j)
        cvr_gt = cvr(table, gt, k=config["k"]).value
        cfg = ClusterConfig(
            seed=seed.spawn(stage),
            k_max=config["k_max"],
            beta=config["beta"],
            n_candidates=config["n_candidates"],
            rank=config["rank"],
            k=config["k"],
            jitter_magnitude=config["jitter"],
        )
        import warnings as _warnings

        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore", CandidatesExhaustedWarning)
            part, score = cluster(ds, gt.n_labels, cfg)
        records.append(
            {
                "dataset": name,
                "n": ds.n_samples,
                "dims": ds.n_dims,
                "clusters": gt.n_labels,
                "rand_index": rand_index(part, gt),
                "cvr_found": score.value,
                "cvr_ground_truth": cvr_gt,
            }
        )
    return records


def _agg_uci(records: list, config: dict) -> dict:
    return {
        r["dataset"]: {
            "rand_index": r["rand_index"],
            "cvr_found": r["cvr_found"],
            "cvr_ground_truth": r["cvr_ground_truth"],
        }
        for r in records
    }


def _curves_uci(agg: dict):
    header = ["dataset", "rand_index", "cvr_found", "cvr_ground_truth"]
    rows = [
        [name, v["rand_index"], v["cvr_found"], v["cvr_ground_truth"]]
        for name, v in agg.items()
    ]
    return [("summary", header, rows)]


BENCHMARKS = {
    "fig2": (_fig2_defaults, _run_fig2),
    "fig4": (_fig4_defaults, _run_fig4),
    "fig6": (_fig6_defaults, _run_fig6),
    "fig7": (_fig7_defaults, _run_fig7),
    "uci": (_uci_defaults, _run_uci),
}

_AGGREGATORS = {
    "fig2": _agg_fig2,
    "fig4": _agg_fig4,
    "fig6": _agg_fig6,
    "fig7": _agg_fig7,
    "uci": _agg_uci,
}

_CURVES = {
    "fig2": _curves_fig2,
    "fig4": _curves_fig4,
    "fig6": _curves_fig6,
    "fig7": _curves_fig7,
    "uci": _curves_uci,
}


def run_benchmark(
    name: str, params: dict | None = None, seed: SeedSpec = SeedSpec(0)
) -> ExperimentReport:
    """Run one named experiment with optional parameter overrides."""
    if name not in BENCHMARKS:
        raise ValueError(
            f"unknown benchmark {name!r}; valid names: {', '.join(sorted(BENCHMARKS))}"
        )
    defaults_fn, run_fn = BENCHMARKS[name]
    config = defaults_fn()
    if params:
        unknown = set(params) - set(config)
        if unknown:
            raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
        config.update(params)
    start = time.perf_counter()
    records = run_fn(config, seed)
    aggregates = _AGGREGATORS[name](records, config)
    duration = time.perf_counter() - start
    config_echo = dict(config)
    config_echo["seed_root"] = seed.root
    config_echo["seed_path"] = list(seed.path)
    return ExperimentReport(
        name=name,
        config=config_echo,
        records=records,
        aggregates=aggregates,
        duration_s=duration,
    )
