"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 I/O or input-format error,
4 computation error (e.g. a score that is undefined for the input).
Identical arguments and input files produce byte-identical output
artifacts; all randomness is derived from --seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from .baselines import ObjectiveKind
from .data import SeedSpec, jitter, load_csv, standardize, write_csv
from .errors import DataFormatError, UndefinedScoreError, UndersizedClusterError
from .estimators import cvr
from .neighbors import build_neighbor_table
from .optimizer import ClusterConfig, cluster
from .synth import (
    DiskAnnulusSpec,
    TwoUniformSpec,
    sample_disk_annulus,
    sample_two_uniform,
    scan_radius,
    scan_threshold,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_COMPUTE = 4


def _add_input_args(p: argparse.ArgumentParser, with_labels: bool = True) -> None:
    p.add_argument("--input", required=True, help="input CSV of sample coordinates")
    p.add_argument(
        "--has-header", action="store_true", help="first line of --input is a header"
    )
    if with_labels:
        p.add_argument(
            "--label-column",
            default=None,
            help="class column (name with --has-header, else 0-based index)",
        )
    p.add_argument(
        "--standardize",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="shift/scale features to mean 0, sd 1 (default on for real data)",
    )
    p.add_argument(
        "--jitter",
        type=float,
        default=1e-10,
        help="uniform coordinate noise half-width; 0 disables (default 1e-10)",
    )


def _parse_label_column(value):
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        return value


def _load_prepared(args, seed: SeedSpec):
    ds = load_csv(
        args.input,
        label_column=_parse_label_column(getattr(args, "label_column", None)),
        has_header=args.has_header,
    )
    if args.standardize:
        ds = standardize(ds)
    if args.jitter > 0:
        ds = jitter(ds, seed.spawn(0), args.jitter)
    return ds


def _read_labels(path) -> np.ndarray:
    try:
        with open(path) as fh:
            values = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    try:
        return np.array([int(v) for v in values], dtype=np.int32)
    except ValueError as exc:
        raise DataFormatError(f"{path}: labels must be integers, one per line") from exc


def _write_json(payload: dict, path=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_cluster(args) -> int:
    seed = SeedSpec(args.seed)
    ds = _load_prepared(args, seed)
    cfg = ClusterConfig(
        seed=seed,
        k_max=args.k_max,
        beta=args.beta,
        n_candidates=args.candidates,
        rank=args.rank,
        k=args.k,
        jitter_magnitude=0.0,  # already applied on the prepared dataset
    )
    part, score = cluster(ds, args.clusters, cfg)
    with open(args.output, "w") as fh:
        fh.writelines(f"{int(label)}\n" for label in part.labels)
    payload = {
        "cvr": score.value,
        "n_clusters": int(part.n_nonempty),
        "cluster_sizes": [int(c) for c in part.counts if c > 0],
        "n_samples": ds.n_samples,
        "seed": args.seed,
        "config": {
            "k_max": args.k_max,
            "beta": args.beta,
            "candidates": args.candidates,
            "rank": args.rank,
            "k": args.k,
            "standardize": bool(args.standardize),
            "jitter": args.jitter,
        },
    }
    _write_json(payload, args.report)
    return EXIT_OK


def _cmd_score(args) -> int:
    seed = SeedSpec(args.seed)
    ds = _load_prepared(args, seed)
    labels = _read_labels(args.labels)
    if labels.shape[0] != ds.n_samples:
        raise DataFormatError(
            f"label file has {labels.shape[0]} rows, dataset has {ds.n_samples}"
        )
    from .data import Partition

    part = Partition.from_labels(labels)
    table = build_neighbor_table(ds)
    payload = {"n_samples": ds.n_samples, "n_clusters": int(part.n_nonempty)}
    from .baselines import mi_objective, nic_objective

    for name, fn in [
        ("cvr", lambda: cvr(table, part, k=args.k).value),
        ("mi", lambda: mi_objective(table, part, k=args.mi_k).value),
        ("nic", lambda: nic_objective(table, part).value),
    ]:
        try:
            payload[name] = fn()
        except (UndefinedScoreError, UndersizedClusterError) as exc:
            payload[name] = None
            payload[f"{name}_invalid_reason"] = str(exc)
    _write_json(payload, args.output)
    return EXIT_OK


def _scan_command(args, radial: bool) -> int:
    seed = SeedSpec(args.seed)
    ds = _load_prepared(args, seed)
    objective = ObjectiveKind(args.objective)
    if radial:
        radii = np.linspace(0.0, args.r_max, args.grid_size) if args.r_max else None
        result = scan_radius(ds, objective, radii=radii, k=args.k)
    else:
        result = scan_threshold(ds, objective, k=args.k)
    result.to_csv(args.output)
    return EXIT_OK


def _cmd_synth(args) -> int:
    seed = SeedSpec(args.seed)
    if args.family == "two-uniform":
        ds = sample_two_uniform(
            TwoUniformSpec(args.width_a, args.gap, args.width_b), args.n, seed
        )
    else:
        ds = sample_disk_annulus(
            DiskAnnulusSpec(args.r_a, args.r_b, args.r_c), args.n, seed
        )
    write_csv(ds, args.output)
    return EXIT_OK


def _cmd_bench(args) -> int:
    params = {}
    if args.reps is not None:
        params["reps"] = args.reps
    if args.threads is not None:
        params["workers"] = args.threads
    if args.name == "uci":
        if not args.data_dir:
            raise DataFormatError("bench uci requires --data-dir with the dataset CSVs")
        import os

        datasets = {}
        for name in ["iris", "wine", "glass"]:
            path = os.path.join(args.data_dir, f"{name}.csv")
            if os.path.exists(path):
                datasets[name] = {"path": path, "label_column": "label", "has_header": True}
        if not datasets:
            raise DataFormatError(f"no dataset CSVs found under {args.data_dir}")
        params["datasets"] = datasets
        params.pop("reps", None)
    report = bench_mod.run_benchmark(args.name, params, SeedSpec(args.seed))
    import os

    os.makedirs(args.output_dir, exist_ok=True)
    report.write_json(os.path.join(args.output_dir, f"{args.name}_report.json"))
    report.write_plot_csvs(args.output_dir)
    return EXIT_OK


def _cmd_rand_index(args) -> int:
    a = _read_labels(args.labels_a)
    b = _read_labels(args.labels_b)
    try:
        value = bench_mod.rand_index(a, b)
    except ValueError as exc:
        raise UndefinedScoreError(str(exc)) from exc
    sys.stdout.write(f"{value}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvclust",
        description="Cluster data by minimizing coarse-graining consistency violation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a CSV and write labels + report")
    _add_input_args(p)
    p.add_argument("--clusters", type=int, required=True, help="target cluster count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-max", type=int, default=10, help="affinity neighbor cutoff")
    p.add_argument("--beta", type=float, default=None, help="affinity shift (default 1/(k_max(k_max+1)))")
    p.add_argument("--candidates", type=int, default=200, help="rounded candidate partitions")
    p.add_argument("--rank", type=int, default=None, help="embedding rank (default ceil(sqrt(2N)), max 32)")
    p.add_argument("--k", type=int, default=1, help="neighbor rank for the uncertainty score")
    p.add_argument("--output", required=True, help="labels CSV (one label per input row)")
    p.add_argument("--report", default=None, help="JSON report path (default stdout)")
    p.set_defaults(fn=_cmd_cluster)

    p = sub.add_parser("score", help="score a given labeling of a CSV")
    _add_input_args(p)
    p.add_argument("--labels", required=True, help="label file, one integer per row")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--mi-k", type=int, default=3, help="neighbor rank for the MI baseline")
    p.add_argument("--output", default=None, help="JSON output path (default stdout)")
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("scan-1d", help="objective over all threshold splits of 1-D data")
    _add_input_args(p, with_labels=False)
    p.add_argument("--objective", choices=[o.value for o in ObjectiveKind], default="cvr")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="CSV of (parameter, score, valid)")
    p.set_defaults(fn=lambda a: _scan_command(a, radial=False))

    p = sub.add_parser("scan-radial", help="objective over radial splits of 2-D data")
    _add_input_args(p, with_labels=False)
    p.add_argument("--objective", choices=[o.value for o in ObjectiveKind], default="cvr")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--r-max", type=float, default=None, help="largest scanned radius")
    p.add_argument("--grid-size", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="CSV of (parameter, score, valid)")
    p.set_defaults(fn=lambda a: _scan_command(a, radial=True))

    p = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    p.add_argument("--family", choices=["two-uniform", "disk-annulus"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width-a", type=float, default=1.0)
    p.add_argument("--gap", type=float, default=0.5)
    p.add_argument("--width-b", type=float, default=2.0)
    p.add_argument("--r-a", type=float, default=1.1)
    p.add_argument("--r-b", type=float, default=1.4)
    p.add_argument("--r-c", type=float, default=3.5)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("bench", help="run a named experiment")
    p.add_argument("name", choices=sorted(bench_mod.BENCHMARKS))
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--threads", type=int, default=None, help="worker thread cap (results identical)")
    p.add_argument("--data-dir", default=None, help="directory with iris/wine/glass CSVs (uci)")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("rand-index", help="pair-agreement score of two label files")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    p.set_defaults(fn=_cmd_rand_index)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DataFormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except (UndefinedScoreError, UndersizedClusterError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_COMPUTE


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
