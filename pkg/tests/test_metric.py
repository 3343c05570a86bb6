"""
Tests for exact metric kernels: quadratic-surd comparison, balls, closeness
of finite sets, computable points.
Run from project root: python -m pytest tests/test_metric.py -v
"""

import sys
from decimal import Decimal, getcontext
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.metric import (
    Ball,
    Cmp,
    ComputablePoint,
    QuadExpr,
    ball_index,
    ball_of,
    balls_contained,
    balls_disjoint,
    cmp_quad,
    dyadic_below,
    eps_close,
    hausdorff_lt,
    hausdorff_sq,
    level_for,
    point_approx,
    sqrt_lower,
    sqrt_upper,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=50)
nonneg = st.fractions(min_value=0, max_value=50, max_denominator=50)
points2 = st.tuples(small, small)


def _decimal_value(x: QuadExpr) -> Decimal:
    """x to 60 significant digits."""
    getcontext().prec = 60
    p = Decimal(x.p.numerator) / Decimal(x.p.denominator)
    if x.q == 0:
        return p
    q = Decimal(x.q.numerator) / Decimal(x.q.denominator)
    r = Decimal(x.r.numerator) / Decimal(x.r.denominator)
    return p + q * r.sqrt()


@given(small, small, nonneg, small, small, nonneg)
@settings(max_examples=500)
def test_cmp_quad_matches_decimal_oracle(p1, q1, r1, p2, q2, r2):
    """Exact comparison agrees with 60-digit arithmetic whenever the gap is visible."""
    x, y = QuadExpr(p1, q1, r1), QuadExpr(p2, q2, r2)
    gap = _decimal_value(x) - _decimal_value(y)
    result = cmp_quad(x, y)
    if abs(gap) > Decimal("1e-40"):
        expected = Cmp.LESS if gap < 0 else Cmp.GREATER
        assert result is expected, f"{x} vs {y}: gap {gap}, got {result}"
    assert cmp_quad(y, x) is Cmp(-result.value)


def test_cmp_quad_detects_exact_equality():
    assert cmp_quad(QuadExpr.sqrt_of(8), QuadExpr(0, 2, 2)) is Cmp.EQUAL
    assert cmp_quad(QuadExpr(Fraction(1, 2), 1, 2), QuadExpr.sqrt_of(2).shifted(Fraction(1, 2))) is Cmp.EQUAL
    assert cmp_quad(QuadExpr.sqrt_of(4), QuadExpr(2)) is Cmp.EQUAL


@given(nonneg, st.integers(min_value=0, max_value=30))
def test_sqrt_bounds_bracket_the_root(x, k):
    lo, hi = sqrt_lower(x, k), sqrt_upper(x, k)
    assert lo * lo <= x <= hi * hi
    assert hi - lo < Fraction(2, 1 << k)


def test_level_and_dyadic_helpers():
    assert level_for(1) == 0
    assert level_for(Fraction(1, 4)) == 2
    assert level_for(Fraction(1, 5)) == 3
    assert dyadic_below(Fraction(1, 4)) == Fraction(1, 8)
    assert dyadic_below(Fraction(3, 10)) == Fraction(1, 4)
    assert dyadic_below(5) == 1
    with pytest.raises(ValueError):
        level_for(0)


def test_ball_predicates():
    a = Ball((0, 0), 1)
    assert balls_disjoint(a, Ball((3, 0), Fraction(3, 2)))
    assert not balls_disjoint(a, Ball((2, 0), 1)), "touching closed balls are not formally disjoint"
    assert balls_contained(Ball((Fraction(1, 4), 0), Fraction(1, 2)), a)
    assert not balls_contained(Ball((Fraction(1, 2), 0), Fraction(1, 2)), a), "internally tangent is not formal"
    with pytest.raises(ValueError):
        Ball((0, 0), 0)


@given(points2, st.fractions(min_value=Fraction(1, 64), max_value=8, max_denominator=64))
@settings(max_examples=100)
def test_ball_index_round_trips(center, radius):
    ball = Ball(center, radius)
    assert ball_of(ball_index(ball), 2) == ball


def test_hausdorff_of_point_sets():
    A = [(0, 0), (1, 0)]
    B = [(0, 0), (1, 0), (1, 1)]
    assert hausdorff_sq(A, B) == 1
    assert hausdorff_lt(A, B, Fraction(101, 100))
    assert not hausdorff_lt(A, B, 1)
    assert eps_close(A, B, Fraction(101, 100))
    assert not eps_close(A, B, 1)


@given(st.lists(points2, min_size=1, max_size=6), st.lists(points2, min_size=1, max_size=6),
       st.fractions(min_value=Fraction(1, 100), max_value=10, max_denominator=100))
@settings(max_examples=100)
def test_eps_close_agrees_with_hausdorff(A, B, eps):
    assert eps_close(A, B, eps) == hausdorff_lt(A, B, eps)


@given(st.lists(points2, min_size=1, max_size=12), st.lists(points2, min_size=1, max_size=12),
       st.fractions(min_value=Fraction(1, 100), max_value=10, max_denominator=100))
@settings(max_examples=100)
def test_bucketed_hausdorff_matches_the_exact_distance(A, B, c):
    assert hausdorff_lt(A, B, c) == (hausdorff_sq(A, B) < c * c)


def test_hausdorff_on_dense_grids():
    n = 4096
    A = [(Fraction(i, n), Fraction(0)) for i in range(n + 1)]
    B = [(Fraction(i, n), Fraction(1, 1 << 14)) for i in range(0, n + 1, 2)]
    assert hausdorff_lt(A, B, Fraction(1, n))
    assert not hausdorff_lt(A, B, Fraction(1, 1 << 14))


def test_computable_points():
    x = ComputablePoint.constant((Fraction(1, 3), 2), "x")
    assert point_approx(x, 7) == (Fraction(1, 3), Fraction(2))
    y = ComputablePoint.from_rational_approx(lambda k: (Fraction(1, 1 << k), Fraction(0)), 2, "y")
    assert y.point(3) == (Fraction(1, 8), 0)
    with pytest.raises(ValueError):
        y.point(-1)


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
