"""
The formal calculus on codes: disjointness and containment at ball, union
and family level, formal diameter and mesh, and the semidecidable test
K ⊆_eps J_j.

A UnionCode j denotes J_j, the union of the balls I_i for i in [j]; a
FamilyCode l denotes the ordered family (J_{(l)_0}, ..., J_{(l)_{l-bar}}).
All predicates here are decided exactly on rational data: every comparison
of a distance against a rational radius sum is a comparison of squares.
"""

import logging
import threading
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

from src.budget import Fuel, SearchTimeout, Verdict, as_fuel
from src.config import (
    CONTAINMENT_EXTRA_STAGES,
    DEFAULT_DIM,
    DIAM_UPPER_PRECISION,
    POINT_MARGIN_STAGES,
    SUBSET_EPS_EXTRA_STAGES,
)
from src.encoding import decode_seq, encode_seq
from src.metric import (
    Ball,
    balls_contained,
    balls_disjoint,
    Bound,
    Cmp,
    ComputablePoint,
    QuadExpr,
    ball_of,
    cmp_quad,
    level_for,
    sq_dist,
    sqrt_upper,
)
from src.spatial import SpaceHash

if TYPE_CHECKING:
    from src.sets import ComputableCompactSet

log = logging.getLogger(__name__)

UnionCode = int
FamilyCode = int


# ---------------------------------------------------------------------------
# Code registry: codes built here are decoded once
# ---------------------------------------------------------------------------

_registry_lock = threading.Lock()
_UNIONS: dict[tuple[int, int], tuple[Ball, ...]] = {}
_FAMILIES: dict[int, tuple[int, ...]] = {}


def _dedupe(balls: Iterable[Ball]) -> tuple[Ball, ...]:
    seen: set[int] = set()
    out = []
    for ball in balls:
        if ball.index not in seen:
            seen.add(ball.index)
            out.append(ball)
    return tuple(out)


def union_balls(j: UnionCode, dim: int = DEFAULT_DIM) -> tuple[Ball, ...]:
    """The balls I_i, i in [j], in decode order without repeats."""
    key = (j, dim)
    with _registry_lock:
        cached = _UNIONS.get(key)
    if cached is not None:
        return cached
    balls = _dedupe(ball_of(i, dim) for i in decode_seq(j))
    with _registry_lock:
        _UNIONS[key] = balls
    return balls


def union_code_of(balls: Iterable[Ball]) -> UnionCode:
    """A UnionCode j with J_j the union of the given balls."""
    balls = _dedupe(balls)
    if not balls:
        raise ValueError("a union code needs at least one ball")
    j = encode_seq([b.index for b in balls])
    with _registry_lock:
        _UNIONS[(j, balls[0].dim)] = balls
    return j


def family_links(l: FamilyCode) -> tuple[UnionCode, ...]:
    """(l)_0, ..., (l)_{l-bar} in order."""
    with _registry_lock:
        cached = _FAMILIES.get(l)
    if cached is not None:
        return cached
    links = tuple(decode_seq(l))
    with _registry_lock:
        _FAMILIES[l] = links
    return links


def family_code_of(unions: Iterable[UnionCode]) -> FamilyCode:
    links = tuple(unions)
    if not links:
        raise ValueError("a family code needs at least one union")
    l = encode_seq(list(links))
    with _registry_lock:
        _FAMILIES[l] = links
    return l


# ---------------------------------------------------------------------------
# Disjointness and containment
# ---------------------------------------------------------------------------

def _axis_separated(a: Ball, b: Ball) -> bool:
    for ca, cb in zip(a.center, b.center):
        if abs(ca - cb) > a.radius + b.radius:
            return True
    return False


def balls_sets_disjoint(xs: Sequence[Ball], ys: Sequence[Ball]) -> bool:
    """Every ball of xs formally disjoint from every ball of ys."""
    for a in xs:
        for b in ys:
            if not _axis_separated(a, b) and not balls_disjoint(a, b):
                return False
    return True


def balls_sets_contained(xs: Sequence[Ball], ys: Sequence[Ball]) -> bool:
    """Every ball of xs formally contained in some ball of ys."""
    if len(ys) <= 8:
        return all(any(balls_contained(a, b) for b in ys) for a in xs)
    index = SpaceHash(ys)
    return all(index.container_of(a) is not None for a in xs)


def f_disjoint_balls(i: int, j: int, dim: int = DEFAULT_DIM) -> bool:
    return balls_disjoint(ball_of(i, dim), ball_of(j, dim))


def f_contained_balls(i: int, j: int, dim: int = DEFAULT_DIM) -> bool:
    return balls_contained(ball_of(i, dim), ball_of(j, dim))


def f_disjoint_unions(a: UnionCode, b: UnionCode, dim: int = DEFAULT_DIM) -> bool:
    return balls_sets_disjoint(union_balls(a, dim), union_balls(b, dim))


def f_contained_unions(i: UnionCode, j: UnionCode, dim: int = DEFAULT_DIM) -> bool:
    return balls_sets_contained(union_balls(i, dim), union_balls(j, dim))


def containing_unions(
    sources: Sequence[UnionCode], targets: Sequence[UnionCode], dim: int = DEFAULT_DIM
) -> list[Optional[int]]:
    """For each source union, the least position of a target union formally containing it.

    Target balls are indexed once; only targets with a ball around the first
    ball of a source are tried for it.
    """
    owner: list[int] = []
    balls: list[Ball] = []
    for t, u in enumerate(targets):
        for b in union_balls(u, dim):
            balls.append(b)
            owner.append(t)
    index = SpaceHash(balls)
    out: list[Optional[int]] = []
    for s in sources:
        src = union_balls(s, dim)
        candidates = sorted({owner[b] for b in index.around(src[0].center) if balls_contained(src[0], balls[b])})
        out.append(next(
            (t for t in candidates if balls_sets_contained(src[1:], union_balls(targets[t], dim))),
            None,
        ))
    return out


def unions_inside_some(sources: Sequence[UnionCode], targets: Sequence[UnionCode], dim: int = DEFAULT_DIM) -> bool:
    return all(t is not None for t in containing_unions(sources, targets, dim))


def f_contained_families(i: FamilyCode, j: FamilyCode, dim: int = DEFAULT_DIM) -> bool:
    return unions_inside_some(sorted(set(family_links(i))), family_links(j), dim)


# ---------------------------------------------------------------------------
# Formal diameter and mesh
# ---------------------------------------------------------------------------

def balls_fdiam_expr(balls: Sequence[Ball]) -> QuadExpr:
    """diam{λ_u} + 2 max ρ_u as an exact QuadExpr."""
    if not balls:
        raise ValueError("formal diameter of an empty union")
    far = Fraction(0)
    centers = [b.center for b in balls]
    for pos, c in enumerate(centers):
        for other in centers[pos + 1:]:
            d2 = sq_dist(c, other)
            if d2 > far:
                far = d2
    return QuadExpr(2 * max(b.radius for b in balls), Fraction(1), far)


def fdiam_expr(j: UnionCode, dim: int = DEFAULT_DIM) -> QuadExpr:
    return balls_fdiam_expr(union_balls(j, dim))


def _bound(value: QuadExpr, c) -> Bound:
    return Bound.LESS if cmp_quad(value, QuadExpr(Fraction(c))) is Cmp.LESS else Bound.GEQ


def fdiam_cmp(j: UnionCode, c, dim: int = DEFAULT_DIM) -> Bound:
    """LESS iff fdiam(j) < c."""
    return _bound(fdiam_expr(j, dim), c)


def fdiam_approx(j: UnionCode, k: int, dim: int = DEFAULT_DIM) -> Fraction:
    """A rational above fdiam(j) by less than 2^-k."""
    return fdiam_expr(j, dim).upper(k)


fdiam_upper = fdiam_approx


def fmesh_expr(l: FamilyCode, dim: int = DEFAULT_DIM) -> QuadExpr:
    """max over u in [l] of fdiam(u)."""
    best: Optional[QuadExpr] = None
    for u in sorted(set(family_links(l))):
        value = fdiam_expr(u, dim)
        if best is None or cmp_quad(value, best) is Cmp.GREATER:
            best = value
    return best


def fmesh_cmp(l: FamilyCode, c, dim: int = DEFAULT_DIM) -> Bound:
    c = Fraction(c)
    for u in sorted(set(family_links(l))):
        if fdiam_cmp(u, c, dim) is Bound.GEQ:
            return Bound.GEQ
    return Bound.LESS


def _cross(o: Sequence[Fraction], a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Iterable[Sequence[Fraction]]) -> list[tuple]:
    """Vertices of the convex hull of planar rational points (monotone chain, exact)."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[tuple] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return lower[:-1] + upper[:-1]


def diam_upper(K: "ComputableCompactSet") -> Fraction:
    """Upper bound on diam K from its 2^-10 approximation plus 2·2^-10.

    In the plane the farthest pair is searched among convex hull vertices only.
    """
    k = DIAM_UPPER_PRECISION
    pts = K.points(k)
    if K.dim == 2:
        pts = convex_hull_2d(pts)
    far = Fraction(0)
    for pos, p in enumerate(pts):
        for q in pts[pos + 1:]:
            d2 = sq_dist(p, q)
            if d2 > far:
                far = d2
    return sqrt_upper(far, k) + Fraction(2, 1 << k)


# ---------------------------------------------------------------------------
# Margin certificates against finite point approximations
# ---------------------------------------------------------------------------

def _inside_with_margin(point, ball: Ball, margin: Fraction) -> bool:
    room = ball.radius - margin
    return room > 0 and sq_dist(point, ball.center) < room * room


def _all_inside(points, balls: Sequence[Ball], margin: Fraction) -> bool:
    index = SpaceHash(balls)
    for p in points:
        if not any(_inside_with_margin(p, balls[b], margin) for b in index.around(p)):
            return False
    return True


def subset_eps_semidecide(
    K: "ComputableCompactSet",
    eps,
    j: UnionCode,
    fuel,
) -> Verdict:
    """Semidecide K ⊆_eps J_j: K ⊆ J_j, every ball of [j] meets K, all radii < eps.

    Stage m looks at K's 2^-m approximation and asks for clearance 2^-m.
    """
    eps = Fraction(eps)
    fuel = as_fuel(fuel)
    balls = union_balls(j, K.dim)
    try:
        if any(b.radius >= eps for b in balls):
            fuel.spend(1, "subset_eps")
            return Verdict.TIMEOUT
        index = SpaceHash(balls)
        m0 = level_for(min(b.radius for b in balls)) + 1
        for m in range(m0, m0 + SUBSET_EPS_EXTRA_STAGES + 1):
            fuel.spend(1, "subset_eps")
            margin = Fraction(1, 1 << m)
            hit = [False] * len(balls)
            covered = True
            for p in K.points(m):
                found = False
                for b in index.around(p):
                    if _inside_with_margin(p, balls[b], margin):
                        found = True
                        hit[b] = True
                if not found:
                    covered = False
                    break
            if covered and all(hit):
                log.debug("K ⊆_eps J_j certified at stage %d (%d balls)", m, len(balls))
                return Verdict.YES
    except SearchTimeout:
        return Verdict.TIMEOUT
    return Verdict.TIMEOUT


def compact_inside(K: "ComputableCompactSet", j: UnionCode, fuel: Optional[Fuel] = None) -> bool:
    """Certified K ⊆ J_j by margins; False means "not certified"."""
    balls = union_balls(j, K.dim)
    m0 = level_for(min(b.radius for b in balls)) + 1
    for m in range(m0, m0 + CONTAINMENT_EXTRA_STAGES + 1):
        if fuel is not None:
            fuel.spend(1, "compact_inside")
        if _all_inside(K.points(m), balls, Fraction(1, 1 << m)):
            return True
    return False


def _point_precision(balls: Sequence[Ball], extra: Optional[Fraction] = None) -> int:
    smallest = min(b.radius for b in balls)
    if extra is not None:
        smallest = min(smallest, extra)
    return level_for(smallest) + POINT_MARGIN_STAGES


def point_in_union(x: ComputablePoint, j: UnionCode, k: Optional[int] = None) -> bool:
    """Certified x ∈ J_j from x's approximations up to precision k.

    By default k runs POINT_MARGIN_STAGES past the level of the smallest radius.
    """
    balls = union_balls(j, x.dim)
    if k is None:
        k = _point_precision(balls)
    for m in range(k + 1):
        p = x.point(m)
        margin = Fraction(1, 1 << m)
        if any(_inside_with_margin(p, b, margin) for b in balls):
            return True
    return False


def point_union_distance_lt(x: ComputablePoint, j: UnionCode, c, k: Optional[int] = None) -> bool:
    """Certified d(x, J_j) < c from x's approximations up to precision k."""
    c = Fraction(c)
    balls = union_balls(j, x.dim)
    if k is None:
        k = _point_precision(balls, c)
    for m in range(k + 1):
        p = x.point(m)
        margin = Fraction(1, 1 << m)
        for b in balls:
            reach = b.radius + c - margin
            if reach > 0 and sq_dist(p, b.center) < reach * reach:
                return True
    return False
