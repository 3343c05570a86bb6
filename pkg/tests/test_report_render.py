"""
Tests for run reports, the closeness certificate and SVG rendering.
Run from project root: python -m pytest tests/test_report_render.py -v
"""

import copy
import json
import sys
from fractions import Fraction
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.approx import approximate_graph
from src.budget import Fuel
from src.config import fixture_path
from src.fixtures import parse_fixture
from src.render import render_svg
from src.report import (
    REPORT_VERSION,
    build_run_report,
    endpoints_frame,
    verify_certificate,
    write_csv,
    write_json,
)


def straight_report(precision=6):
    fixture = parse_fixture(fixture_path("straight-arc"))
    report = approximate_graph(fixture, Fraction(1, 16), Fuel(100))
    return fixture, report, build_run_report(report, fixture, precision, 100)


def cut_log(bounds, eps="1/4"):
    """A report carrying only what the certificate check reads."""
    cuts = [{"edge": "e", "side": "start", "lipschitz": "1", "t": b, "bound": b} for b in bounds]
    worst = max((Fraction(b) for b in bounds), default=Fraction(0))
    return {
        "cuts": cuts,
        "certificate": {"epsilon": eps, "hausdorff_bound": str(2 * worst), "holds": True},
    }


def test_report_fields():
    fixture, report, run = straight_report()
    assert run["version"] == REPORT_VERSION
    assert run["fixture"] == "straight-arc" and run["status"] == "ok"
    assert run["epsilon"] == "1/16"
    assert run["window"] is None, "arcs need no window"
    assert run["same_as_source"] is True
    assert run["cuts"] == []
    assert {(e["edge"], e["side"], e["origin"]) for e in run["endpoints"]} == {
        ("a", "start", "vertex"), ("a", "end", "vertex"),
    }
    assert run["certificate"]["holds"] is True
    assert "timings" not in run


def test_reports_are_deterministic(tmp_path):
    _, _, first = straight_report()
    _, _, second = straight_report()
    a = write_json(first, tmp_path / "a.json").read_bytes()
    b = write_json(second, tmp_path / "b.json").read_bytes()
    assert a == b
    assert a.endswith(b"\n")
    assert json.loads(a) == first


def test_timeout_report_has_no_certificate():
    fixture = parse_fixture(fixture_path("hidden-arc"))
    run = build_run_report(None, fixture, 6, 5, status="timeout")
    assert run["status"] == "timeout"
    assert run["certificate"] is None
    assert not verify_certificate(run)


def test_certificate_is_rechecked_from_the_cut_log():
    assert verify_certificate(cut_log(["1/16", "1/32"]))
    assert verify_certificate(cut_log([]))
    assert not verify_certificate(cut_log(["1/8"])), "2·1/8 is not below 1/4"
    tampered = cut_log(["1/16"])
    tampered["cuts"][0]["bound"] = "1/64"
    assert not verify_certificate(tampered)
    inflated = copy.deepcopy(cut_log(["1/16"]))
    inflated["certificate"]["hausdorff_bound"] = "1/16"
    assert not verify_certificate(inflated)


def test_endpoint_table(tmp_path):
    _, _, run = straight_report()
    frame = endpoints_frame(run)
    assert list(frame.columns) == ["edge", "side", "origin", "precision", "x0", "x1"]
    assert len(frame) == 2
    out = write_csv(run, tmp_path / "endpoints.csv")
    assert out.read_text(encoding="utf-8").splitlines()[0] == "edge,side,origin,precision,x0,x1"


def test_svg_is_deterministic_and_labelled(tmp_path):
    fixture, report, _ = straight_report()
    a = render_svg(fixture, report, tmp_path / "a.svg").read_text(encoding="utf-8")
    b = render_svg(fixture, report, tmp_path / "b.svg").read_text(encoding="utf-8")
    assert a == b
    for gid in ("S-edge-a", "T-edge-a", "S-end-a-start", "S-end-a-end", "T-end-a-start", "T-end-a-end"):
        assert f'id="{gid}"' in a, gid


def test_svg_marks_hidden_endpoints(tmp_path):
    fixture = parse_fixture(fixture_path("hidden-ray"))
    svg = render_svg(fixture, None, tmp_path / "ray.svg").read_text(encoding="utf-8")
    assert 'id="S-hull-r-start"' in svg
    assert 'id="S-edge-r"' in svg
    assert "T-edge" not in svg


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
