"""
Command-line drivers.

  approximate  run approximate_graph on a fixture and write the report
               (json), the endpoint table (csv) and the figure (svg)
  check        run the property suites against a fixture

Exit status: 0 on success, 1 on bad input, failed checks or a certificate
that failed at every precision tried, 2 on usage errors, 3 when the fuel
runs out. The partial report is written in both failure cases.
"""

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from src.approx import approximate_graph
from src.budget import CertificationError, Fuel, SearchTimeout
from src.checks import results_frame, run_suite
from src.config import (
    CHECK_SUITES,
    DEFAULT_FUEL,
    DEFAULT_JOBS,
    DEFAULT_PRECISION,
    DEFAULT_WINDOW,
    ENDPOINTS_FNAME,
    FIGURE_FNAME,
    FIGURES_DIR,
    LOG_FORMAT,
    OUTPUT_FORMATS,
    REPORT_FNAME,
    REPORTS_DIR,
)
from src.encoding import parse_rational
from src.fixtures import parse_fixture
from src.render import render_svg
from src.report import build_run_report, write_csv, write_json

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3


def _positive_rational(text: str) -> Fraction:
    try:
        value = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_approximation",
        description="Computable approximation of semicomputable graphs.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixture", required=True, type=Path, help="fixture json file")
    common.add_argument("--fuel", type=_natural, default=DEFAULT_FUEL, help="search budget")
    common.add_argument("--window", type=_positive_rational, default=Fraction(DEFAULT_WINDOW),
                        help="half-width R of the window [-R, R]^n for rays")
    common.add_argument("--output-dir", type=Path, default=None, help="where reports go")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    approx = sub.add_parser("approximate", parents=[common], help="approximate a graph")
    approx.add_argument("--epsilon", required=True, type=_positive_rational, help="closeness bound, e.g. 1/16")
    approx.add_argument("--precision", type=_natural, default=DEFAULT_PRECISION,
                        help="k for the 2^-k endpoint approximations in the report")
    approx.add_argument("--out", action="append", choices=OUTPUT_FORMATS, default=None,
                        help="output format (repeatable; default json)")
    approx.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="parallel per-edge jobs")
    approx.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    check = sub.add_parser("check", parents=[common], help="run property suites")
    check.add_argument("--suite", default="all", choices=CHECK_SUITES, help="suite to run")
    return parser


def cmd_approximate(args) -> int:
    fixture = parse_fixture(args.fixture)
    fuel = Fuel(args.fuel)
    out_dir = args.output_dir or REPORTS_DIR
    formats = args.out or ["json"]
    started = time.perf_counter()
    status, report, code = "ok", None, EXIT_OK
    try:
        report = approximate_graph(fixture, args.epsilon, fuel, window=args.window, jobs=args.jobs)
    except SearchTimeout as exc:
        log.error("Fuel exhausted during %s after %d units", exc.stage, exc.spent)
        status, report, code = "timeout", exc.partial, EXIT_TIMEOUT
    except CertificationError as exc:
        log.error("Could not certify %s during %s (precision 2^-%d)", exc.predicate, exc.stage, exc.precision)
        status, report, code = "uncertified", exc.partial, EXIT_ERROR
    timings = {"approximate": time.perf_counter() - started} if args.timings else None
    run_report = build_run_report(report, fixture, args.precision, args.fuel, timings=timings, status=status)
    if "json" in formats:
        write_json(run_report, out_dir / REPORT_FNAME.format(name=fixture.name))
    if "csv" in formats:
        write_csv(run_report, out_dir / ENDPOINTS_FNAME.format(name=fixture.name))
    if "svg" in formats:
        fig_dir = FIGURES_DIR if args.output_dir is None else out_dir / "figures"
        render_svg(fixture, report if status == "ok" else None, fig_dir / FIGURE_FNAME.format(name=fixture.name),
                   window=args.window, precision=args.precision)
    if status == "ok":
        if report.same_as_source:
            log.info("No hidden endpoints: T = S")
        else:
            log.info("Certified d_H(S, T) < %s with %d cuts", args.epsilon, len(report.cuts))
    return code


def cmd_check(args) -> int:
    fixture = parse_fixture(args.fixture)
    try:
        rows = run_suite(args.suite, fixture, Fuel(args.fuel))
    except SearchTimeout as exc:
        log.error("Fuel exhausted during %s after %d units", exc.stage, exc.spent)
        return EXIT_TIMEOUT
    except CertificationError as exc:
        log.error("Could not certify %s during %s (precision 2^-%d)", exc.predicate, exc.stage, exc.precision)
        return EXIT_ERROR
    frame = results_frame(rows)
    for row in rows:
        log.info("%s %-6s %s %s", "PASS" if row.passed else "FAIL", row.suite, row.name,
                 f"({row.detail})" if row.detail else "")
    if args.output_dir is not None:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.output_dir / f"{fixture.name}_checks.csv", index=False)
    failed = int((~frame["passed"]).sum()) if len(frame) else 0
    log.info("%d checks, %d failed", len(frame), failed)
    return EXIT_OK if failed == 0 else EXIT_ERROR


COMMANDS = {"approximate": cmd_approximate, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT, force=True)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
