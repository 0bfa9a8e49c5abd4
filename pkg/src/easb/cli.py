"""Command-line entry point: ``easb entropy|cluster|compare|simulate``.

Exit status is 0 on success, 2 for usage or input validation errors and 1 for
anything else. ``EASB_LOG`` sets the log level (default WARNING).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .balance import DEFAULT_EPS, ValidationError
from .clustering import DEFAULT_BETA, DEFAULT_TAU, cluster_baseline, cluster_easb, evaluate_partition
from .data import ScenarioSpec, load_sites
from .experiments import ALL_METHODS, compare, comparison_rows, simulate
from .report import render_rows
from .svg import scatter_svg

log = logging.getLogger("easb")

FORMATS = ("table", "csv", "json")


class UsageError(Exception):
    pass


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be a positive integer")
    return v


def _mix(text):
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad mix {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("mix needs four comma-separated fractions b,g,a,d")
    if any(not 0 <= f <= 1 for f in parts) or abs(sum(parts) - 1) > 1e-9:
        raise argparse.ArgumentTypeError("mix fractions must lie in [0, 1] and sum to 1")
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None,
                        help="output format (default: table)")
    common.add_argument("--output", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")
    common.add_argument("--age-bins", type=int, default=9,
                        help="decade age bins used when reading records (default: 9)")

    clustering = argparse.ArgumentParser(add_help=False)
    clustering.add_argument("--tau", type=_unit_interval, default=DEFAULT_TAU)
    clustering.add_argument("--beta", type=_unit_interval, default=DEFAULT_BETA)
    clustering.add_argument("--eps", type=float, default=DEFAULT_EPS)
    clustering.add_argument("--weighted", action="store_true",
                            help="size-weight the cross-cluster averages")

    parser = argparse.ArgumentParser(prog="easb", description=__doc__.splitlines()[0])
    parser.add_argument("--format", dest="global_format", choices=FORMATS, default=None)
    parser.add_argument("--output", dest="global_output", metavar="PATH", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", parents=[common], help="per-site entropy table")
    p.add_argument("input")

    p = sub.add_parser("cluster", parents=[common, clustering], help="cluster sites")
    p.add_argument("input")
    p.add_argument("--method", choices=ALL_METHODS, default="easb")
    p.add_argument("--k", type=_positive_int, default=None,
                   help="cluster count for the cosine/euclidean baselines")
    p.add_argument("--svg", metavar="PATH", default=None)

    p = sub.add_parser("compare", parents=[common, clustering],
                       help="average balance per method")
    p.add_argument("input")
    p.add_argument("--method", choices=ALL_METHODS, default=None,
                   help="report only this method")

    p = sub.add_parser("simulate", parents=[common, clustering],
                       help="EASB against baselines over seeded synthetic scenarios")
    p.add_argument("--sites", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mix", type=_mix, default=(0.1, 0.3, 0.3, 0.3), metavar="b,g,a,d")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--jobs", type=_positive_int, default=1)
    return parser


def _emit(text: str, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_entropy(args) -> str:
    sites = load_sites(args.input, args.age_bins)
    rows = [{"id": s.id, "gender_entropy_pct": 100 * s.h_gender,
             "age_entropy_pct": 100 * s.h_age, "hw": s.hw} for s in sites]
    return render_rows(rows, args.format)


def cmd_cluster(args) -> str:
    if args.method == "easb" and args.k is not None:
        raise UsageError("--k applies only to the cosine/euclidean baselines")
    if args.method != "easb" and args.k is None:
        raise UsageError(f"--method {args.method} requires --k")
    sites = load_sites(args.input, args.age_bins)
    if args.method == "easb":
        part = cluster_easb(sites, args.tau, args.beta, args.eps)
    else:
        part = cluster_baseline(sites, args.method, args.k)
    for c in part.clusters:
        log.info("cluster %d: %s", c.id, ", ".join(c.members))
    report = evaluate_partition(part, weighted=args.weighted)
    if args.svg:
        Path(args.svg).write_text(
            scatter_svg(sites, part, title=f"{args.method} clustering"), encoding="utf-8")
    return report.render(args.format)


def cmd_compare(args) -> str:
    sites = load_sites(args.input, args.age_bins)
    methods = (args.method,) if args.method else ALL_METHODS
    reports = compare(sites, args.tau, args.beta, args.eps, methods, args.weighted)
    return render_rows(comparison_rows(reports), args.format)


def cmd_simulate(args) -> str:
    spec = ScenarioSpec(n_sites=args.sites, seed=args.seed, age_bins=args.age_bins,
                        imbalance_mix=args.mix)
    summary = simulate(spec, args.trials, args.tau, args.beta, args.eps,
                       args.weighted, jobs=args.jobs)
    if args.format == "json":
        return json.dumps(summary, indent=2) + "\n"
    rows = [{"method": m, "mean_hw": summary["mean_hw"][m],
             "easb_win_rate": summary.get(f"win_rate_vs_{m}", ""),
             "easb_mean_improvement": summary.get(f"mean_improvement_vs_{m}", "")}
            for m in ALL_METHODS]
    return render_rows(rows, args.format)


COMMANDS = {"entropy": cmd_entropy, "cluster": cmd_cluster,
            "compare": cmd_compare, "simulate": cmd_simulate}


def main(argv=None) -> int:
    level = os.environ.get("EASB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.format = args.format or args.global_format or (
        "json" if args.command == "simulate" else "table")
    args.output = args.output or args.global_output
    if not 0.0 < getattr(args, "eps", DEFAULT_EPS) < 0.5:
        print("easb: error: --eps must lie in (0, 0.5)", file=sys.stderr)
        return 2
    try:
        _emit(COMMANDS[args.command](args), args.output)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"easb: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"easb: error: no such file: {exc.filename or exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError, KeyError) as exc:
        print(f"easb: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"easb: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
