"""
Run reports for approximate_graph: endpoint tables, cut log and the
closeness certificate, written as JSON (and CSV through pandas).

The certificate is re-verifiable from the report alone: every cut removes a
piece within lipschitz·t of its endpoint, and the new endpoint lies in that
same ball, so d_H(S, T) < 2·max(lipschitz·t) <= eps.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional

import pandas as pd

from src.approx import CutResult, GraphApproxReport
from src.config import ensure_dirs
from src.encoding import format_point, format_rational, parse_rational
from src.fixtures import GraphFixture

log = logging.getLogger(__name__)

REPORT_VERSION = 1


def _cut_entry(cut: CutResult, precision: int) -> dict:
    return {
        "edge": cut.edge_id,
        "side": cut.side,
        "case": cut.case,
        "t": format_rational(cut.t),
        "lipschitz": format_rational(cut.lipschitz),
        "bound": format_rational(cut.bound),
        "eps": format_rational(cut.eps),
        "u0": format_rational(cut.u0),
        "delta": format_rational(cut.delta),
        "z": format_point(cut.z.point(precision)),
    }


def _endpoint_rows(report: GraphApproxReport, precision: int) -> list[dict]:
    rows = []
    for edge in report.edges:
        for side in sorted(edge.endpoints):
            ep = edge.endpoints[side]
            rows.append({
                "edge": edge.edge_id,
                "side": side,
                "origin": ep.origin,
                "precision": precision,
                "point": format_point(ep.point.point(precision)),
            })
    return rows


def certificate(report: GraphApproxReport) -> dict:
    """Closeness certificate: d_H(S, T) < 2·max cut bound, compared with eps."""
    bound = max((c.bound for c in report.cuts), default=Fraction(0))
    return {
        "claim": "d_H(S, T) < epsilon" + (" on the window" if report.window_applies else ""),
        "epsilon": format_rational(report.eps),
        "hausdorff_bound": format_rational(2 * bound),
        "holds": 2 * bound < report.eps or not report.cuts,
    }


def build_run_report(
    report: Optional[GraphApproxReport],
    fixture: GraphFixture,
    precision: int,
    fuel_budget: int,
    timings: Optional[dict] = None,
    status: str = "ok",
) -> dict:
    """Plain-data report of one approximation run.

    `report` may be partial (status "timeout" or "uncertified"); timings are included only
    when given so that default reports are byte-identical between runs.
    """
    edges = report.edges if report is not None else []
    out = {
        "version": REPORT_VERSION,
        "fixture": fixture.name,
        "dim": fixture.dim,
        "status": status,
        "epsilon": None if report is None else format_rational(report.eps),
        "window": format_rational(Fraction(report.window)) if report is not None and fixture.has_rays else None,
        "precision": precision,
        "fuel": {"budget": fuel_budget, "spent": 0 if report is None else report.fuel_spent},
        "same_as_source": report is not None and status == "ok" and report.same_as_source,
        "edges": [
            {"id": e.edge_id, "kind": e.kind, "case": e.case, "cuts": len(e.cuts)}
            for e in edges
        ],
        "endpoints": [] if report is None else _endpoint_rows(report, precision),
        "cuts": [] if report is None else [_cut_entry(c, precision) for c in report.cuts],
        "certificate": None if report is None or status != "ok" else certificate(report),
    }
    if timings:
        out["timings"] = {k: round(v, 3) for k, v in sorted(timings.items())}
    return out


def verify_certificate(run_report: dict) -> bool:
    """Recheck the closeness certificate from the report's own cut log."""
    cert = run_report.get("certificate")
    if cert is None:
        return False
    eps = parse_rational(cert["epsilon"])
    worst = Fraction(0)
    for cut in run_report["cuts"]:
        bound = parse_rational(cut["lipschitz"]) * parse_rational(cut["t"])
        if bound != parse_rational(cut["bound"]):
            log.debug("cut on %s/%s reports bound %s, recomputed %s", cut["edge"], cut["side"], cut["bound"], bound)
            return False
        worst = max(worst, bound)
    if parse_rational(cert["hausdorff_bound"]) != 2 * worst:
        return False
    return not run_report["cuts"] or 2 * worst < eps


def write_json(run_report: dict, path) -> Path:
    path = Path(path)
    ensure_dirs()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(run_report, f, indent=2)
        f.write("\n")
    log.info("Wrote report %s", path)
    return path


def endpoints_frame(run_report: dict) -> pd.DataFrame:
    """One row per endpoint of T, coordinates as exact "p/q" strings."""
    rows = []
    for ep in run_report["endpoints"]:
        row = {k: ep[k] for k in ("edge", "side", "origin", "precision")}
        for c, value in enumerate(ep["point"]):
            row[f"x{c}"] = value
        rows.append(row)
    return pd.DataFrame(rows, columns=None if rows else ["edge", "side", "origin", "precision"])


def write_csv(run_report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    endpoints_frame(run_report).to_csv(path, index=False)
    log.info("Wrote endpoint table %s", path)
    return path
