"""
Tests for the formal calculus: disjointness, containment, formal diameter,
mesh and the K ⊆_eps J_j semidecision.
Run from project root: python -m pytest tests/test_formal.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.budget import Fuel, Verdict
from src.checks import check_formal, hull_samples
from src.config import RANDOM_STATE
from src.formal import (
    compact_inside,
    containing_unions,
    convex_hull_2d,
    diam_upper,
    f_contained_families,
    f_contained_unions,
    f_disjoint_unions,
    family_code_of,
    family_links,
    fdiam_approx,
    fdiam_cmp,
    fdiam_expr,
    fmesh_cmp,
    point_in_union,
    point_union_distance_lt,
    subset_eps_semidecide,
    union_balls,
    union_code_of,
)
from src.metric import Ball, Bound, Cmp, ComputablePoint, QuadExpr, cmp_quad
from src.sets import ComputableCompactSet, join_compacts
from src.fixtures import fixture_from_dict


def segment(a, b, label: str = "segment") -> ComputableCompactSet:
    """[a, b] with exact points spaced below 2^-k at precision k."""
    a = tuple(Fraction(x) for x in a)
    b = tuple(Fraction(x) for x in b)

    def sampler(k: int):
        n = 1 << (k + 2)
        return [tuple(p + (q - p) * i / n for p, q in zip(a, b)) for i in range(n + 1)]

    return ComputableCompactSet(sampler, len(a), label)


def union(*balls) -> int:
    return union_code_of(Ball(c, r) for c, r in balls)


def test_union_codes_round_trip_through_registry():
    j = union(((0, 0), Fraction(1, 2)), ((1, 0), Fraction(1, 2)))
    assert [b.center for b in union_balls(j)] == [(0, 0), (1, 0)]
    l = family_code_of([j, j])
    assert family_links(l) == (j, j)


def test_disjoint_and_contained_unions():
    a = union(((0, 0), 1), ((1, 0), 1))
    far = union(((5, 0), 1))
    near = union(((3, 0), 1))
    inner = union(((0, 0), Fraction(1, 2)), ((1, 0), Fraction(1, 4)))
    assert f_disjoint_unions(a, far)
    assert not f_disjoint_unions(a, near), "closed hulls touch at (2, 0)"
    assert f_contained_unions(inner, a)
    assert not f_contained_unions(a, inner)
    assert f_contained_families(family_code_of([inner]), family_code_of([far, a]))


def test_formal_diameter_examples():
    single = union(((0, 0), Fraction(1, 2)))
    assert fdiam_cmp(single, 1) is Bound.GEQ
    assert fdiam_cmp(single, 2) is Bound.LESS
    pair = union(((0, 0), 1), ((3, 0), 2))
    assert cmp_quad(fdiam_expr(pair), QuadExpr(7)) is Cmp.EQUAL
    diagonal = union(((0, 0), Fraction(1, 4)), ((1, 1), Fraction(1, 4)))
    assert cmp_quad(fdiam_expr(diagonal), QuadExpr(Fraction(1, 2), 1, 2)) is Cmp.EQUAL
    assert fdiam_cmp(diagonal, 2) is Bound.LESS
    upper = fdiam_approx(diagonal, 10)
    assert 0 <= upper - (Fraction(1, 2) + Fraction(14142135, 10**7)) < Fraction(1, 1 << 9)


def test_fmesh_is_the_largest_link():
    small = union(((0, 0), Fraction(1, 2)))
    big = union(((0, 0), 1), ((3, 0), 2))
    l = family_code_of([small, big])
    assert fmesh_cmp(l, 7) is Bound.GEQ
    assert fmesh_cmp(l, Fraction(71, 10)) is Bound.LESS
    assert fmesh_cmp(family_code_of([small]), 2) is fdiam_cmp(small, 2)


def test_subset_eps_examples():
    K = segment((0, 0), (1, 0))
    j = union(((0, 0), Fraction(3, 4)), ((1, 0), Fraction(3, 4)))
    assert subset_eps_semidecide(K, 1, j, Fuel(100)) is Verdict.YES
    big = union(((0, 0), 2), ((1, 0), 2))
    assert subset_eps_semidecide(K, 1, big, Fuel(100)) is Verdict.TIMEOUT, "radii must be below eps"
    short = union(((0, 0), Fraction(3, 4)))
    assert subset_eps_semidecide(K, 1, short, Fuel(100)) is Verdict.TIMEOUT, "(1, 0) is not covered"
    assert subset_eps_semidecide(K, 1, j, Fuel(0)) is Verdict.TIMEOUT


def test_subset_eps_yes_bounds_the_formal_diameter():
    K = segment((0, 0), (1, 0))
    j = union(((0, 0), Fraction(3, 4)), ((1, 0), Fraction(3, 4)))
    r = 1
    assert subset_eps_semidecide(K, r, j, Fuel(100)) is Verdict.YES
    assert fdiam_cmp(j, 4 * r + diam_upper(K)) is Bound.LESS


def test_compact_inside_and_point_certificates():
    K = segment((0, 0), (1, 0))
    j = union(((Fraction(1, 2), 0), 1))
    assert compact_inside(K, j)
    assert not compact_inside(K, union(((0, 0), Fraction(1, 2))))
    x = ComputablePoint.constant((Fraction(1, 2), Fraction(1, 8)))
    assert point_in_union(x, j)
    assert not point_in_union(x, union(((3, 3), 1)))
    assert point_union_distance_lt(x, union(((2, 0), 1)), Fraction(3, 4))
    assert not point_union_distance_lt(x, union(((2, 0), 1)), Fraction(1, 4))


def test_diam_upper_on_a_triangle():
    K = join_compacts([segment((0, 0), (2, 0)), segment((2, 0), (1, 2)), segment((1, 2), (0, 0))])
    d = diam_upper(K)
    assert d * d >= 5
    assert (d - Fraction(1, 128)) ** 2 < 5


def test_convex_hull_drops_interior_and_collinear_points():
    pts = [(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 1), (Fraction(1, 2), Fraction(3, 2))]
    hull = convex_hull_2d([tuple(Fraction(c) for c in p) for p in pts])
    assert set(hull) == {(0, 0), (2, 0), (2, 2), (0, 2)}
    assert convex_hull_2d([(0, 0), (1, 1)]) == [(0, 0), (1, 1)]


def test_containing_unions_picks_the_least_container():
    wide = union(((0, 0), 2))
    also_wide = union(((0, 0), 3))
    right = union(((5, 0), 1))
    inner = union(((Fraction(1, 2), 0), Fraction(1, 4)), ((0, Fraction(1, 2)), Fraction(1, 4)))
    near_right = union(((5, Fraction(1, 4)), Fraction(1, 2)))
    outside = union(((9, 9), Fraction(1, 4)))
    assert containing_unions([inner, near_right, outside], [right, wide, also_wide]) == [1, 0, None]


def test_point_certificates_reach_below_tiny_radii():
    tiny = Fraction(1, 1 << 16)
    x = ComputablePoint.from_rational_approx(lambda k: (Fraction(1, 3) + Fraction(1, 1 << (k + 2)), Fraction(0)), 2)
    inside = union(((Fraction(1, 3), 0), tiny))
    assert point_in_union(x, inside)
    assert not point_in_union(x, inside, k=12)
    beside = union(((Fraction(1, 3) + 2 * tiny, 0), tiny))
    assert point_union_distance_lt(x, beside, 2 * tiny)
    assert not point_union_distance_lt(x, beside, tiny / 2)


def test_hull_samples_lie_in_closed_hulls():
    rng = np.random.default_rng(RANDOM_STATE)
    j = union(((0, 0), 1), ((2, 1), Fraction(1, 3)))
    balls = union_balls(j)
    for p in hull_samples(j, 2, rng):
        assert any(b.closed_contains(p) for b in balls), f"{p} outside the hull"


def test_formal_suite_finds_no_violations():
    fixture = fixture_from_dict({
        "name": "unit", "dim": 2,
        "edges": [{"id": "a", "kind": "arc", "points": [["0", "0"], ["1", "0"]]}],
    })
    rows = check_formal(fixture, Fuel(1000), np.random.default_rng(RANDOM_STATE), n_samples=150)
    assert rows and all(r.passed for r in rows), [r for r in rows if not r.passed]


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
