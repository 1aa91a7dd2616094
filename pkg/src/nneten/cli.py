"""Command-line interface.

Subcommands cover the full experiment surface: entropy computation,
sine-map class generation, the 72-setting separation sweep, feature
combination / synergy analysis, EEG-style feature extraction and a
timing benchmark.  All experiment outputs are plain CSV/JSON; with a
fixed --seed the output files are byte-identical across runs and
thread counts.

Exit codes: 0 success, 1 computational error, 2 usage or input error.
"""

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .analysis import FeatureTable, difference_grid, entropy_sweep, f_ratio, rkf_accuracy, synergy
from .chaos import SineMapConfig, sine_map_series
from .dataset import write_synthetic_data
from .engine import (
    DatasetCache,
    NNetEnSettings,
    compute_nneten,
    nset_to_settings,
    nset_values_many,
    write_log,
)
from .entropies import sample_entropy, svd_entropy
from .errors import (
    ConfigurationError,
    DomainError,
    FormatError,
    NNetEnError,
    ParseError,
)
from .lognnet import METRIC_TYPES
from .sigprep import FilterSpec, component_signal, decompose_eeg

_USAGE_ERRORS = (FormatError, ParseError, ConfigurationError, FileNotFoundError, OSError)


def read_series_csv(path):
    """Read one time series per row; rows may have different lengths."""
    series = []
    with open(path, newline="") as f:
        for r_idx, row in enumerate(csv.reader(f)):
            values = [cell for cell in row if cell.strip() != ""]
            if not values:
                continue
            try:
                series.append(np.array([float(v) for v in values]))
            except ValueError:
                raise ParseError(f"{path}: non-numeric value in row {r_idx + 1}", row=r_idx + 1) from None
    if not series:
        raise FormatError(f"{path}: no series found")
    return series


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _parse_nsets(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    for n in out:
        if not 1 <= n <= 72:
            raise DomainError(f"nset {n} outside 1..72")
    return out


def _settings_from_args(args):
    if args.nset is not None:
        return nset_to_settings(args.nset, dataset=args.dataset.upper(), mu=args.mu, seed=args.seed)
    metric = {"acc": "Acc", "r2e": "R2E", "pe": "PE"}[args.metric.lower()]
    return NNetEnSettings(
        dataset=args.dataset.upper(),
        mu=args.mu,
        method=int(args.method.lower().lstrip("m")),
        epochs=args.epochs,
        metric=metric,
        seed=args.seed,
    )


def _add_dataset_args(parser):
    parser.add_argument("--dataset", default="d1", choices=["d1", "d2", "D1", "D2"],
                        help="reference dataset (default d1)")
    parser.add_argument("--mu", type=float, default=1.0, help="database usage fraction (0.01..1)")
    parser.add_argument("--data-dir", default=None,
                        help="dataset directory (default: NNETEN_DATA_DIR)")
    parser.add_argument("--seed", type=int, default=42, help="weight-init seed")


def cmd_compute(args):
    settings = _settings_from_args(args)
    cache = DatasetCache(args.data_dir)
    for series in read_series_csv(args.series):
        result = compute_nneten(series, settings, cache)
        print(repr(result.value))
        if args.log:
            write_log(result, args.log_path)
    return 0


def cmd_generate(args):
    os.makedirs(args.out_dir, exist_ok=True)
    for r in args.r:
        config = SineMapConfig(r=r, x_start=args.x_start, burn_in=args.burn_in,
                               series_length=args.length, series_count=args.count)
        rows = [[repr(float(v)) for v in s] for s in sine_map_series(config)]
        path = os.path.join(args.out_dir, f"sine_r{r}.csv")
        with open(path, "w", newline="") as f:
            csv.writer(f, lineterminator="\n").writerows(rows)
        print(path)
    return 0


def cmd_separate(args):
    classes = [read_series_csv(path) for path in args.classes]
    cache = DatasetCache(args.data_dir)
    prepared = cache.get(args.dataset.upper(), args.mu)
    nsets = _parse_nsets(args.nsets)
    rows = entropy_sweep(classes, prepared, nsets, seed=args.seed, threads=args.threads)
    header = ["nset", "metric", "method", "epochs"]
    for i in range(len(classes)):
        header += [f"mean_class{i}", f"std_class{i}"]
    header += ["f_ratio", "p_value"]
    out_rows = []
    for row in rows:
        cells = [row.nset, row.metric, f"M{row.method}", row.epochs]
        for mean, std in zip(row.class_means, row.class_stds):
            cells += [repr(mean), repr(std)]
        cells += [_f_str(row.f), repr(row.f.p_value)]
        out_rows.append(cells)
    _write_csv(args.out, header, out_rows)
    print(args.out)
    return 0


def _f_str(f_result):
    if f_result.is_infinite:
        return "inf"
    if f_result.is_undefined:
        return "undefined"
    return repr(f_result.f)


def _class_values(cache, args, dataset, mu, nsets, classes, threads, seed):
    prepared = cache.get(dataset, mu)
    per_class = [nset_values_many(prepared, cls, nsets, seed=seed, threads=threads)
                 for cls in classes]
    # (settings, observations) matrix plus matching labels
    values = np.array([[d[n] for cls in per_class for d in cls] for n in nsets])
    labels = np.concatenate([np.full(len(cls), i) for i, cls in enumerate(per_class)])
    return values, labels


def cmd_combo(args):
    classes = [read_series_csv(path) for path in args.classes]
    cache = DatasetCache(args.data_dir)
    nsets_a = _parse_nsets(args.nsets_a)
    nsets_b = _parse_nsets(args.nsets_b)
    values_a, labels = _class_values(cache, args, args.dataset_a.upper(), args.mu, nsets_a,
                                     classes, args.threads, args.seed)
    values_b, _ = _class_values(cache, args, args.dataset_b.upper(), args.mu, nsets_b,
                                classes, args.threads, args.seed)
    grid = difference_grid(values_a, values_b, labels)
    header = ["nset_a\\nset_b"] + [str(n) for n in nsets_b]
    rows = [[str(na)] + [_f_str(grid[i, j]) for j in range(len(nsets_b))]
            for i, na in enumerate(nsets_a)]
    _write_csv(args.grid_out, header, rows)

    sampen = np.array([sample_entropy(s) for cls in classes for s in cls])
    report = {"sampen_a_rkf": None, "pairs": []}
    base = rkf_accuracy(FeatureTable(sampen, ("SampEn",), labels))
    report["sampen_a_rkf"] = base.a_rkf
    for i, n in enumerate(nsets_a):
        single = rkf_accuracy(FeatureTable(values_a[i], (f"nneten_{n}",), labels))
        pair = rkf_accuracy(FeatureTable(
            np.column_stack([values_a[i], sampen]), (f"nneten_{n}", "SampEn"), labels))
        report["pairs"].append({
            "nset": n,
            "nneten_a_rkf": single.a_rkf,
            "pair_a_rkf": pair.a_rkf,
            "k_syn": synergy(single.a_rkf, base.a_rkf, pair.a_rkf),
        })
    with open(args.json_out, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    print(args.grid_out)
    print(args.json_out)
    return 0


def _eeg_entropy(component, args, cache):
    if args.entropy == "svden":
        return svd_entropy(component)
    if args.entropy == "sampen":
        return sample_entropy(component)
    settings = nset_to_settings(args.nset, dataset=args.dataset.upper(), mu=args.mu, seed=args.seed)
    return compute_nneten(component, settings, cache).value


def cmd_eeg(args):
    spec = FilterSpec(low_hz=args.low, high_hz=args.high, sample_rate_hz=args.fs)
    components = ([args.component.upper()] if args.component.lower() != "all"
                  else ["RAW", "FILTERED"] + [f"A{i}" for i in range(1, 7)] + [f"D{i}" for i in range(1, 7)])
    cache = DatasetCache(args.data_dir) if args.entropy == "nneten" else None
    feature_rows = []
    observations = {}  # (component, channel) -> (group -> values)
    for group, directory in enumerate(args.groups):
        files = sorted(f for f in os.listdir(directory) if f.endswith(".csv"))
        if not files:
            raise FormatError(f"{directory}: no .csv recordings")
        for name in files:
            data = np.loadtxt(os.path.join(directory, name), delimiter=",", ndmin=2)
            seg_len = data.shape[0] // args.segments
            if seg_len < 2 ** 6:
                raise DomainError(f"{name}: segments of {seg_len} samples are too short")
            for seg in range(args.segments):
                chunk = data[seg * seg_len:(seg + 1) * seg_len]
                for ch in range(chunk.shape[1]):
                    decomp = decompose_eeg(chunk[:, ch], spec)
                    for comp in components:
                        value = _eeg_entropy(component_signal(decomp, comp), args, cache)
                        feature_rows.append([comp, ch, group, name, seg, repr(float(value))])
                        observations.setdefault((comp, ch), {}).setdefault(group, []).append(value)
    _write_csv(args.features_out,
               ["component", "channel", "group", "file", "segment", "value"], feature_rows)
    f_rows = []
    for (comp, ch), by_group in sorted(observations.items()):
        groups = [by_group[g] for g in sorted(by_group)]
        result = f_ratio(groups)
        f_rows.append([comp, ch, _f_str(result), repr(result.p_value)])
    _write_csv(args.f_out, ["component", "channel", "f_ratio", "p_value"], f_rows)
    print(args.features_out)
    print(args.f_out)
    return 0


def cmd_bench(args):
    cache = DatasetCache(args.data_dir)
    config = SineMapConfig(r=1.7551, series_count=1, series_length=args.length)
    series = sine_map_series(config)[0]
    rows = []
    for dataset in [d.upper() for d in args.datasets.split(",")]:
        for mu in [float(m) for m in args.mus.split(",")]:
            settings = NNetEnSettings(dataset=dataset, mu=mu, method=args.method,
                                      epochs=args.epochs, metric="Acc", seed=args.seed)
            cache.get(dataset, mu)  # warm the dataset outside the timing
            best = min(compute_nneten(series, settings, cache).wall_time
                       for _ in range(args.repeat))
            rows.append([dataset, repr(mu), repr(best)])
            print(f"{dataset} mu={mu}: {best:.4f} s")
    _write_csv(args.out, ["dataset", "mu", "seconds"], rows)
    return 0


def cmd_synth_data(args):
    write_synthetic_data(args.out, mnist_scale=args.mnist_scale, seed=args.seed)
    print(args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="nneten",
                                     description="Neural network entropy of time series")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="entropy of each series in a CSV file")
    p.add_argument("series", help="CSV file, one series per row")
    _add_dataset_args(p)
    p.add_argument("--method", default="m3", help="reservoir filling method m1..m6 (default m3)")
    p.add_argument("--epochs", type=int, default=20, help="training epochs (default 20)")
    p.add_argument("--metric", default="acc", choices=["acc", "r2e", "pe"],
                   help="classification metric (default acc)")
    p.add_argument("--nset", type=int, default=None,
                   help="settings code 1..72 overriding method/epochs/metric")
    p.add_argument("--log", action=argparse.BooleanOptionalAction, default=True,
                   help="append evaluations to the log file (default on)")
    p.add_argument("--log-path", default="log.txt")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("generate", help="generate sine-map signal classes")
    p.add_argument("--r", type=float, action="append", required=True,
                   help="map parameter, repeatable (one output file per value)")
    p.add_argument("--count", type=int, default=100, help="series per class (default 100)")
    p.add_argument("--length", type=int, default=300, help="series length (default 300)")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--x-start", type=float, default=0.1)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("separate", help="settings sweep: class means, S and F per nset")
    p.add_argument("classes", nargs="+", help="one series CSV per class")
    _add_dataset_args(p)
    p.add_argument("--nsets", default="1-72", help="settings codes, e.g. '1-72' or '9,12,34'")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="separate.csv")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("combo", help="difference grids, paired A_RKF and synergy")
    p.add_argument("classes", nargs=2, help="two series CSVs, one per class")
    _add_dataset_args(p)
    p.add_argument("--dataset-a", default="d1")
    p.add_argument("--dataset-b", default="d2")
    p.add_argument("--nsets-a", default="1-8")
    p.add_argument("--nsets-b", default="1-8")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--grid-out", default="difference_grid.csv")
    p.add_argument("--json-out", default="combo.json")
    p.set_defaults(func=cmd_combo)

    p = sub.add_parser("eeg", help="filter + DWT + per-channel entropy features and F-ratios")
    p.add_argument("groups", nargs="+", help="one directory of recording CSVs per class")
    _add_dataset_args(p)
    p.add_argument("--fs", type=float, default=500.0, help="sample rate in Hz (default 500)")
    p.add_argument("--low", type=float, default=0.5)
    p.add_argument("--high", type=float, default=32.0)
    p.add_argument("--segments", type=int, default=6, help="segments per recording (default 6)")
    p.add_argument("--component", default="A3",
                   help="RAW, FILTERED, A1..A6, D1..D6 or 'all' (default A3)")
    p.add_argument("--entropy", default="svden", choices=["svden", "sampen", "nneten"])
    p.add_argument("--nset", type=int, default=60, help="settings code for --entropy nneten")
    p.add_argument("--features-out", default="eeg_features.csv")
    p.add_argument("--f-out", default="eeg_f_ratio.csv")
    p.set_defaults(func=cmd_eeg)

    p = sub.add_parser("bench", help="single-evaluation timing vs dataset and mu")
    p.add_argument("--datasets", default="d1,d2")
    p.add_argument("--mus", default="1,0.1,0.01")
    p.add_argument("--method", type=int, default=2)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--length", type=int, default=300)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default="bench.csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth-data", help="write deterministic stand-in datasets")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mnist-scale", type=float, default=1.0,
                   help="shrink factor for the D1 stand-in class counts")
    p.add_argument("--seed", type=int, default=101)
    p.set_defaults(func=cmd_synth_data)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"nneten: error: {exc}", file=sys.stderr)
        return 2
    except NNetEnError as exc:
        print(f"nneten: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
