"""Command line entry point: ``mthresh {threshold,bench,plot-data}``.

Exit codes: 0 success (failed algorithm rows in ``bench`` included), 1 usage
error, 2 I/O error, 3 algorithm failure in ``plot-data``.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .amtis import AmtisConfig
from .bench import (
    METHODS,
    BenchConfig,
    format_csv,
    format_json,
    run_corpus,
    run_single,
    threshold_function,
)
from .errors import EmptyCorpus, ThresholdingError
from .histogram import compute_histogram, write_histogram_csv
from .imagecore import load_gray

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_ALGORITHM = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _method_list(text):
    values = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [v for v in values if v not in METHODS]
    if bad or not values:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {','.join(METHODS)}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mthresh",
                     description="Multilevel histogram thresholding: AMTIS and classical optimizers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--partitions", type=int, default=32,
                        help="AMTIS histogram partitions (must divide 256)")
    common.add_argument("--repeats", type=int, default=20, help="timed runs per record")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="format of the report printed to stdout")
    common.add_argument("--search", choices=("auto", "exhaustive", "dp"), default="dp",
                        help="search used by the classical optimizers")
    common.add_argument("--no-metrics", action="store_true",
                        help="skip PSNR/SSIM/FSIM")

    p = sub.add_parser("threshold", parents=[common], help="threshold a single image")
    p.add_argument("image", type=Path)
    p.add_argument("--method", choices=METHODS, default="amtis")
    p.add_argument("--t", type=int, default=2, help="number of thresholds")
    p.add_argument("--out", type=Path, help="directory for segmented image and histogram CSV")

    p = sub.add_parser("bench", parents=[common], help="benchmark a corpus directory")
    p.add_argument("corpus", type=Path)
    p.add_argument("--method", type=_method_list, default=METHODS,
                   help="comma-separated methods (default: all)")
    p.add_argument("--t", type=_int_list, default=(2, 3, 4, 5),
                   help="comma-separated threshold counts")
    p.add_argument("--out", type=Path, help="directory for reports and per-record outputs")
    p.add_argument("--workers", type=int, default=1, help="parallel image workers")
    p.add_argument("--no-interleave", action="store_true",
                   help="time each record in one block instead of round-robin")

    p = sub.add_parser("plot-data", help="write a histogram CSV with thresholds flagged")
    p.add_argument("image", type=Path)
    p.add_argument("--method", choices=METHODS, default="amtis")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--partitions", type=int, default=32)
    p.add_argument("--search", choices=("auto", "exhaustive", "dp"), default="auto")
    p.add_argument("--out", type=Path, required=True, help="output CSV path")
    return parser


def _config(args, **extra) -> BenchConfig:
    try:
        return BenchConfig(partitions=args.partitions, repeats=args.repeats,
                           baseline_search=args.search, metrics=not args.no_metrics, **extra)
    except ValueError as exc:
        raise UsageError(str(exc))


def _emit(records, fmt):
    sys.stdout.write(format_json(records) + "\n" if fmt == "json" else format_csv(records))


def _cmd_threshold(args):
    if args.t < 1:
        raise UsageError("--t must be >= 1")
    cfg = _config(args, methods=(args.method,), t_values=(args.t,), out_dir=args.out)
    record, _, _ = run_single(args.image, args.method, args.t, cfg)
    _emit([record], args.format)
    return 0


def _cmd_bench(args):
    cfg = _config(args, corpus_dir=args.corpus, methods=args.method, t_values=args.t,
                  out_dir=args.out, workers=args.workers, interleave=not args.no_interleave)
    _emit(run_corpus(cfg), args.format)
    return 0


def _cmd_plot_data(args):
    if args.t < 1:
        raise UsageError("--t must be >= 1")
    try:
        cfg = dataclasses.replace(BenchConfig(), partitions=args.partitions,
                                  baseline_search=args.search)
        AmtisConfig(partitions=args.partitions)
    except ValueError as exc:
        raise UsageError(str(exc))
    gray = load_gray(args.image)
    try:
        ths = threshold_function(args.method, cfg)(gray, args.t)
    except ThresholdingError as exc:
        print(f"mthresh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM
    write_histogram_csv(args.out, compute_histogram(gray), ths)
    return 0


_COMMANDS = {"threshold": _cmd_threshold, "bench": _cmd_bench, "plot-data": _cmd_plot_data}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mthresh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EmptyCorpus) as exc:
        print(f"mthresh: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
