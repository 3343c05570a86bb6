"""
Tests for graph fixtures: loading and validation, hidden-endpoint hulls,
charts and windows, ground truth access.
Run from project root: python -m pytest tests/test_fixtures.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.config import CANONICAL_FIXTURES, EXTRA_FIXTURES, fixture_path
from src.fixtures import (
    ChartWindow,
    HiddenEndpoint,
    dump_fixture,
    fixture_from_dict,
    fixture_to_dict,
    ground_truth_points,
    parse_fixture,
    truth_sq_distance,
)


def graph(*edges, dim=2):
    return {"name": "g", "dim": dim, "edges": list(edges)}


def arc(edge_id, *points, **extra):
    return {"id": edge_id, "kind": "arc", "points": [[str(c) for c in p] for p in points], **extra}


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", CANONICAL_FIXTURES + EXTRA_FIXTURES)
def test_shipped_fixtures_load(name):
    fixture = parse_fixture(fixture_path(name))
    assert fixture.name == name
    assert fixture.edges


def test_edges_may_share_an_endpoint():
    fixture = fixture_from_dict(graph(arc("a", (0, 0), (1, 0)), arc("b", (1, 0), (1, 1))))
    assert [e.id for e in fixture.edges] == ["a", "b"]


@pytest.mark.parametrize("data, message", [
    (graph(arc("a", (0, 0), (2, 2)), arc("b", (0, 2), (2, 0))), "intersect"),
    (graph(arc("a", (0, 0), (2, 0)), arc("b", (1, 0), (3, 0))), "intersect"),
    (graph(arc("a", (0, 0), (1, 0), (2, 0)), arc("b", (1, 0), (1, 1))), "interior vertex"),
    (graph(arc("a", (0, 0), (1, 0)), arc("b", (1, 0), (2, 0), (1, 0))), "overlap"),
    (graph(arc("a", (0, 0), (0, 0))), "zero-length"),
    (graph(arc("a", (0, 0), (1, 0)), arc("a", (5, 5), (6, 5))), "duplicate"),
])
def test_defining_family_violations_rejected(data, message):
    with pytest.raises(ValueError, match=message):
        fixture_from_dict(data)


def test_hidden_hulls_must_nest_and_contain_the_endpoint():
    def hidden(*hulls):
        raw = {"width": "1/8", "hulls": [{"center": list(c), "half_width": w} for c, w in hulls]}
        return graph(arc("h", (0, 0), (2, 1), hidden={"start": raw}))

    fixture_from_dict(hidden((("0", "0"), "1/4"), (("1/16", "0"), "1/8")))
    with pytest.raises(ValueError, match="nested"):
        fixture_from_dict(hidden((("0", "0"), "1/4"), (("1/8", "0"), "1/4")))
    with pytest.raises(ValueError, match="contain"):
        fixture_from_dict(hidden((("1", "1"), "1/4"),))


def test_ray_hidden_endpoint_rules():
    ray = {"id": "r", "kind": "ray", "points": [["0", "0"], ["1", "0"]]}
    with pytest.raises(ValueError, match="no end"):
        fixture_from_dict(graph({**ray, "hidden": {"end": {"width": "1/8"}}}))
    with pytest.raises(ValueError, match="three points"):
        fixture_from_dict(graph({**ray, "hidden": {"start": {"width": "1/8"}}}))


@pytest.mark.parametrize("data", [
    {"dim": 2, "edges": []},
    {"dim": 0, "edges": [arc("a", (0,), (1,))]},
    {"dim": 2, "edges": [{"id": "a", "kind": "loop", "points": [["0", "0"], ["1", "0"]]}]},
    {"dim": 2, "edges": [{"id": "a", "kind": "arc", "points": [[0.5, "0"], ["1", "0"]]}]},
    {"dim": 2, "edges": [{"id": "a", "kind": "arc", "points": [["0", "0"]]}]},
])
def test_malformed_documents_rejected(data):
    with pytest.raises(ValueError):
        fixture_from_dict(data)


def test_parse_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_fixture(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValueError, match="line 1"):
        parse_fixture(bad)


def test_dump_then_parse_preserves_the_document(tmp_path):
    fixture = parse_fixture(fixture_path("triangle-with-tail"))
    out = dump_fixture(fixture, tmp_path / "copy.json")
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 4 + len(fixture.edges) + 2, "one edge per line"
    assert fixture_to_dict(parse_fixture(out)) == fixture_to_dict(fixture)


# ---------------------------------------------------------------------------
# Hidden endpoints
# ---------------------------------------------------------------------------

def test_hulls_shrink_and_nest():
    fixture = parse_fixture(fixture_path("hidden-arc"))
    _, _, h = fixture.hidden_endpoints()[0]
    assert h.hull(0).center == (Fraction(1, 16), Fraction(1, 16)), "explicit hull comes first"
    truth = h.reveal()
    for level in range(8):
        outer, inner = h.hull(level), h.hull(level + 1)
        assert outer.contains_box(inner)
        assert inner.half_width < outer.half_width
        assert inner.contains(truth)


def test_emission_schedule_delays_hulls():
    h = HiddenEndpoint((Fraction(0), Fraction(0)), Fraction(1, 8), delay=2)
    assert [h.available_level(r) for r in range(5)] == [0, 0, 0, 1, 2]
    before = h.emissions
    h.hull(3)
    assert h.emissions == before + 1


def test_algorithm_side_access_never_reveals():
    fixture = parse_fixture(fixture_path("hidden-both"))
    hidden = [h for _, _, h in fixture.hidden_endpoints()]
    assert all(h.data_reads > 0 for h in hidden), "validation reads the fixture data"
    reads = [h.data_reads for h in hidden]
    fixture.cells(5)
    fixture.ce_set().hits_at(fixture.bounding_ball().index, 0)
    chart = fixture.chart("d", "end")
    chart.point(chart.total / 2, 8)
    assert all(h.reveals == 0 for h in hidden)
    assert [h.data_reads for h in hidden] == reads
    ground_truth_points(fixture, 3)
    assert all(h.reveals > 0 for h in hidden)


# ---------------------------------------------------------------------------
# Charts and windows
# ---------------------------------------------------------------------------

def test_straight_chart():
    fixture = parse_fixture(fixture_path("straight-arc"))
    chart = fixture.chart("a")
    assert chart.total == 2
    assert chart.point(1, 10) == (1, 0)
    assert fixture.chart("a", "end").point(0, 10) == (2, 0)
    with pytest.raises(ValueError):
        chart.point(3, 10)
    with pytest.raises(ValueError):
        fixture.chart("a", "middle")


def test_ray_chart_window_end():
    fixture = parse_fixture(fixture_path("hidden-ray"))
    chart = fixture.chart("r")
    end = chart.window_end(8)
    assert end > chart.bounded_length
    assert chart.point(end, 10) == (8, Fraction(1, 2))
    with pytest.raises(ValueError):
        fixture.chart("r", "end")
    with pytest.raises(ValueError):
        ground_truth_points(fixture, 2)
    assert ground_truth_points(fixture, 2, ((-8, -8), (8, 8)))


def test_isolation_on_a_single_arc():
    chart = parse_fixture(fixture_path("straight-arc")).chart("a")
    iso = chart.isolation((Fraction(1, 2), 1), (Fraction(1, 4), Fraction(5, 4)))
    assert 0 < iso <= Fraction(1, 4)
    assert chart.isolation((Fraction(1, 2), 1), (None, None)) is None


def test_chart_window_bounds_and_continuity():
    chart = parse_fixture(fixture_path("straight-arc")).chart("a")
    window = ChartWindow(chart, 1, Fraction(1, 8))
    assert window.point(-4, 10) == (Fraction(1, 2), 0)
    assert window.point(4, 10) == (Fraction(3, 2), 0)
    eps = window.continuity_eps()
    assert 0 < eps <= Fraction(1, 2)
    assert eps.numerator == 1 and eps.denominator & (eps.denominator - 1) == 0, "dyadic"
    with pytest.raises(ValueError):
        ChartWindow(chart, Fraction(1, 4), Fraction(1, 8))
    with pytest.raises(ValueError):
        ChartWindow(chart, 1, 0)


def test_speed_bounds_on_an_affine_window():
    chart = parse_fixture(fixture_path("straight-arc")).chart("a")
    window = ChartWindow(chart, 1, Fraction(1, 8))
    assert window.affine()
    lo, hi = window.speed_bounds()
    assert 0 < lo < Fraction(1, 8) <= hi
    assert hi - lo < Fraction(1, 64)


def test_speed_bounds_need_an_affine_window():
    chart = parse_fixture(fixture_path("sine-arc")).chart("s")
    window = ChartWindow(chart, Fraction(7, 8), Fraction(1, 16))
    assert not window.affine()
    with pytest.raises(ValueError):
        window.speed_bounds()
    assert ChartWindow(chart, Fraction(7, 16), Fraction(1, 64)).affine()


def test_truth_distance():
    fixture = parse_fixture(fixture_path("straight-arc"))
    assert truth_sq_distance(fixture, (Fraction(1), Fraction(1))) == 1
    assert truth_sq_distance(fixture, (Fraction(3), Fraction(0))) == 1


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
