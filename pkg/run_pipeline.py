"""
One-command pipeline: load every canonical fixture -> property checks ->
approximate_graph -> write reports, endpoint tables and figures.
Run from project root: python run_pipeline.py
"""

import sys
from fractions import Fraction
from pathlib import Path

# Ensure project root is on path
PROJECT_ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.approx import approximate_graph
from src.budget import CertificationError, Fuel, SearchTimeout
from src.checks import run_suite
from src.config import (
    CANONICAL_FIXTURES,
    DEFAULT_FUEL,
    DEFAULT_PRECISION,
    ENDPOINTS_FNAME,
    FIGURE_FNAME,
    FIGURES_DIR,
    REPORT_FNAME,
    REPORTS_DIR,
    ensure_dirs,
    fixture_path,
)
from src.fixtures import parse_fixture
from src.render import render_svg
from src.report import build_run_report, verify_certificate, write_csv, write_json

PIPELINE_EPSILON = Fraction(1, 16)
PIPELINE_SUITES = ("formal", "sets")


def main():
    ensure_dirs()
    print("Semicomputable graph approximation: full pipeline")
    print("=" * 50)
    failures = 0
    for name in CANONICAL_FIXTURES:
        path = fixture_path(name)
        if not path.exists():
            print(f"ERROR: fixture {name} not found at {path}")
            return 1
        fixture = parse_fixture(path)
        print(f"\n{name}: {len(fixture.edges)} edges, {len(fixture.hidden_endpoints())} hidden endpoints")

        # 1) Property checks
        for suite in PIPELINE_SUITES:
            rows = run_suite(suite, fixture, Fuel(DEFAULT_FUEL))
            bad = [r for r in rows if not r.passed]
            failures += len(bad)
            print(f"  {suite}: {len(rows) - len(bad)}/{len(rows)} checks passed")

        # 2) Approximate and certify
        status, report = "ok", None
        try:
            report = approximate_graph(fixture, PIPELINE_EPSILON, Fuel(DEFAULT_FUEL))
        except SearchTimeout as exc:
            status, report = "timeout", exc.partial
            failures += 1
            print(f"  approximate: fuel exhausted in {exc.stage}")
        except CertificationError as exc:
            status, report = "uncertified", exc.partial
            failures += 1
            print(f"  approximate: {exc}")
        run = build_run_report(report, fixture, DEFAULT_PRECISION, DEFAULT_FUEL, status=status)
        if status == "ok":
            print(f"  approximate: {len(run['cuts'])} cuts, certificate "
                  f"{'verified' if verify_certificate(run) else 'FAILED'} (eps={PIPELINE_EPSILON})")

        # 3) Artifacts
        write_json(run, REPORTS_DIR / REPORT_FNAME.format(name=name))
        write_csv(run, REPORTS_DIR / ENDPOINTS_FNAME.format(name=name))
        render_svg(fixture, report if status == "ok" else None, FIGURES_DIR / FIGURE_FNAME.format(name=name))

    print(f"\nReports saved to {REPORTS_DIR.relative_to(PROJECT_ROOT)}/")
    print("Done." if failures == 0 else f"Done with {failures} failures.")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
