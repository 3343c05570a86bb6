"""
Set representations as enumerators, and the constructions that transform them.

  SemicomputableSet   Ω = {(i, j) : Î_i ∩ S ⊆ J_j}, semidecided by omega_at
  SemicompactSet      {j : S ⊆ J_j}, semidecided by covers_at
  CeClosedSet         {i : I_i ∩ S ≠ ∅}, semidecided by hits_at
  ComputableCompactSet  k -> finite 2^-k approximation

A stage-indexed semidecider answers True only when the relation holds and is
monotone in the stage. The enumerator generators dovetail (index, stage)
pairs through tau so every true instance is emitted eventually.
"""

import itertools
import logging
import threading
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from src.budget import Fuel, SearchTimeout, Verdict, as_fuel, search_failure
from src.config import (
    APPROX_MAX_STAGE,
    BOUNDING_SEARCH_MAX_EXP,
    ENCLOSURE_MAX_PRECISION,
    OMEGA_MAX_STAGE,
    QUADTREE_MAX_DEPTH,
)
from src.encoding import Point, as_point, tau
from src.formal import UnionCode, subset_eps_semidecide, union_balls, union_code_of
from src.metric import (
    Ball,
    balls_contained,
    balls_disjoint,
    ball_of,
    ceil_sqrt,
    level_for,
    points_bbox,
    sq_dist,
    sqrt_upper,
)
from src.spatial import SpaceHash

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------

class SemicomputableSet(ABC):
    """A closed set S known through the c.e. relation Î_i ∩ S ⊆ J_j."""

    def __init__(self, dim: int):
        self.dim = dim

    @abstractmethod
    def omega_at(self, i: int, j: UnionCode, stage: int) -> bool:
        """Stage-`stage` semidecision of Î_i ∩ S ⊆ J_j."""

    def omega(self) -> Iterator[tuple[int, UnionCode]]:
        """Enumerate Ω without repeats."""
        emitted: set[tuple[int, int]] = set()
        for n in itertools.count():
            code, stage = tau(n)
            i, j = tau(code)
            if (i, j) not in emitted and self.omega_at(i, j, stage):
                emitted.add((i, j))
                yield i, j

    def certify(self, i: int, j: UnionCode, fuel, max_stage: int = OMEGA_MAX_STAGE) -> Verdict:
        fuel = as_fuel(fuel)
        try:
            for stage in range(max_stage + 1):
                fuel.spend(1, "omega")
                if self.omega_at(i, j, stage):
                    return Verdict.YES
        except SearchTimeout:
            return Verdict.TIMEOUT
        return Verdict.TIMEOUT


class SemicompactSet(ABC):
    """A compact set S known through the c.e. relation S ⊆ J_j."""

    def __init__(self, dim: int):
        self.dim = dim

    @abstractmethod
    def covers_at(self, j: UnionCode, stage: int) -> bool:
        """Stage-`stage` semidecision of S ⊆ J_j."""

    def covers(self) -> Iterator[UnionCode]:
        emitted: set[int] = set()
        for n in itertools.count():
            j, stage = tau(n)
            if j not in emitted and self.covers_at(j, stage):
                emitted.add(j)
                yield j

    def certify(self, j: UnionCode, fuel, max_stage: int = OMEGA_MAX_STAGE) -> Verdict:
        fuel = as_fuel(fuel)
        try:
            for stage in range(max_stage + 1):
                fuel.spend(1, "covers")
                if self.covers_at(j, stage):
                    return Verdict.YES
        except SearchTimeout:
            return Verdict.TIMEOUT
        return Verdict.TIMEOUT


class CeClosedSet(ABC):
    """A closed set S known through the c.e. relation I_i ∩ S ≠ ∅."""

    def __init__(self, dim: int):
        self.dim = dim

    @abstractmethod
    def hits_at(self, i: int, stage: int) -> bool:
        """Stage-`stage` semidecision of I_i ∩ S ≠ ∅."""

    def hits_ball_at(self, ball: Ball, stage: int) -> bool:
        return self.hits_at(ball.index, stage)

    def hits(self) -> Iterator[int]:
        emitted: set[int] = set()
        for n in itertools.count():
            i, stage = tau(n)
            if i not in emitted and self.hits_at(i, stage):
                emitted.add(i)
                yield i


class ComputableCompactSet:
    """A compact set given by k -> finite point set P_k with S ≈_{2^-k} P_k."""

    def __init__(self, sampler: Callable[[int], Sequence[Point]], dim: int, label: str = ""):
        self._sampler = sampler
        self.dim = dim
        self.label = label
        self._points: dict[int, list[Point]] = {}
        self._codes: dict[int, UnionCode] = {}
        self._lock = threading.Lock()

    def points(self, k: int) -> list[Point]:
        if k < 0:
            raise ValueError(f"precision must be a natural, got {k}")
        with self._lock:
            if k not in self._points:
                pts = list(dict.fromkeys(as_point(p) for p in self._sampler(k)))
                if not pts:
                    raise ValueError(f"compact set {self.label or '?'} produced no points at k={k}")
                self._points[k] = pts
            return self._points[k]

    def approx(self, k: int) -> UnionCode:
        """j_k: balls of radius 2^-k around the points of P_k."""
        if k not in self._codes:
            radius = Fraction(1, 1 << k)
            self._codes[k] = union_code_of(Ball(p, radius) for p in self.points(k))
        return self._codes[k]

    def __repr__(self) -> str:
        return f"ComputableCompactSet({self.label or 'anonymous'}, dim={self.dim})"


def finite_compact(points: Iterable[Sequence], label: str = "") -> ComputableCompactSet:
    pts = [as_point(p) for p in points]
    if not pts:
        raise ValueError("finite_compact() needs at least one point")
    return ComputableCompactSet(lambda k: pts, len(pts[0]), label)


def join_compacts(parts: Sequence[ComputableCompactSet], label: str = "") -> ComputableCompactSet:
    """Union of finitely many computable compact sets."""
    if not parts:
        raise ValueError("join_compacts() needs at least one part")

    def sampler(k: int) -> list[Point]:
        return [p for part in parts for p in part.points(k)]

    return ComputableCompactSet(sampler, parts[0].dim, label)


# ---------------------------------------------------------------------------
# Code and representation transformers
# ---------------------------------------------------------------------------

def union_code(a: UnionCode, b: UnionCode, dim: int) -> UnionCode:
    """A code for J_a ∪ J_b: the balls of [a] followed by the new balls of [b]."""
    return union_code_of(union_balls(a, dim) + union_balls(b, dim))


class _Subtracted(SemicomputableSet):
    def __init__(self, base: SemicomputableSet, m: UnionCode):
        super().__init__(base.dim)
        self.base = base
        self.m = m
        self._joined: dict[int, int] = {}

    def omega_at(self, i: int, j: UnionCode, stage: int) -> bool:
        if j not in self._joined:
            self._joined[j] = union_code(j, self.m, self.dim)
        return self.base.omega_at(i, self._joined[j], stage)


def subtract_union(S: SemicomputableSet, m: UnionCode) -> SemicomputableSet:
    """S \\ J_m: (i, j) ∈ Ω' iff (i, J_j ∪ J_m) ∈ Ω."""
    return _Subtracted(S, m)


class _Restricted(SemicompactSet):
    def __init__(self, base: SemicomputableSet, i: int):
        super().__init__(base.dim)
        self.base = base
        self.i = i

    def covers_at(self, j: UnionCode, stage: int) -> bool:
        return self.base.omega_at(self.i, j, stage)


def restrict_to_ball(S: SemicomputableSet, i: int) -> SemicompactSet:
    """Î_i ∩ S as a semicompact set."""
    return _Restricted(S, i)


def cells_certify(cells: Iterable[Ball], ball: Ball, union: SpaceHash) -> bool:
    """Every cell not formally disjoint from `ball` is formally inside some ball of `union`."""
    last: Optional[int] = None
    for cell in cells:
        if balls_disjoint(cell, ball):
            continue
        # consecutive cells usually share a container
        if last is not None and balls_contained(cell, union.balls[last]):
            continue
        last = union.container_of(cell)
        if last is None:
            return False
    return True


class _WithCompact(SemicomputableSet):
    def __init__(self, base: SemicomputableSet, K: ComputableCompactSet):
        super().__init__(base.dim)
        self.base = base
        self.K = K

    def _cells(self, k: int) -> list[Ball]:
        radius = Fraction(1, 1 << k)
        return [Ball(p, radius) for p in self.K.points(k)]

    def omega_at(self, i: int, j: UnionCode, stage: int) -> bool:
        if not self.base.omega_at(i, j, stage):
            return False
        ball = ball_of(i, self.dim)
        coarse = self._cells(level_for(ball.radius) + 1)
        if all(balls_disjoint(cell, ball) for cell in coarse):
            return True
        balls = union_balls(j, self.dim)
        k = stage + level_for(min(b.radius for b in balls)) + 2
        return cells_certify(self._cells(k), ball, SpaceHash(balls))


def union_with_compact(S: SemicomputableSet, K: ComputableCompactSet) -> SemicomputableSet:
    """S ∪ K for a computable compact K."""
    return _WithCompact(S, K)


# ---------------------------------------------------------------------------
# Searches
# ---------------------------------------------------------------------------

def box_radius(half_width: Fraction, dim: int) -> Fraction:
    """Radius of a ball around a cube of the given half-width containing its closure."""
    return half_width * ceil_sqrt(dim) + half_width / 4


def _children(center: Point, half_width: Fraction) -> Iterator[Point]:
    quarter = half_width / 2
    for signs in itertools.product((-1, 1), repeat=len(center)):
        yield tuple(c + s * quarter for c, s in zip(center, signs))


def enclosing_ball(K: ComputableCompactSet, k: int = 4) -> Ball:
    """A rational ball whose open interior contains K.

    The approximation precision is raised until its slack is at most an
    eighth of the radius, so small compacts get tight enclosures.
    """
    while True:
        pts = K.points(k)
        lo, hi = points_bbox(pts)
        center = tuple((a + b) / 2 for a, b in zip(lo, hi))
        far = max(sq_dist(center, p) for p in pts)
        slack = Fraction(2, 1 << k)
        radius = sqrt_upper(far, k) + slack
        if 8 * slack <= radius or k >= ENCLOSURE_MAX_PRECISION:
            return Ball(center, radius)
        k += 4


def carve_compact(
    S: SemicomputableSet,
    K: ComputableCompactSet,
    U: Sequence[Ball],
    fuel,
) -> SemicompactSet:
    """S' with K ⊆ S' ⊆ U, given K ⊆ U ∩ S and U as a finite union of open balls.

    S' = (Î_i ∩ S) \\ J_m: Î_i encloses K, and J_m covers Î_i \\ U by quadtree
    boxes formally disjoint from a cover of K.
    """
    fuel = as_fuel(fuel)
    if not U:
        raise ValueError("carve_compact() needs a nonempty open region U")
    fuel.spend(1, "carve_compact")
    enclosure = enclosing_ball(K)
    i = enclosure.index
    region = SpaceHash(U)
    dim = K.dim
    for attempt in range(QUADTREE_MAX_DEPTH):
        k_cover = level_for(min(b.radius for b in U)) + 2 + attempt
        cover = SpaceHash([Ball(p, Fraction(1, 1 << k_cover)) for p in K.points(k_cover)])
        kept: list[Ball] = []
        unresolved = False
        frontier = [(enclosure.center, enclosure.radius)]
        for depth in range(QUADTREE_MAX_DEPTH + attempt + 1):
            next_frontier = []
            for center, w in frontier:
                fuel.spend(1, "carve_compact")
                ball = Ball(center, box_radius(w, dim))
                if cover.touching(ball) is None:
                    kept.append(ball)
                elif region.container_of(ball) is not None or balls_disjoint(ball, enclosure):
                    continue
                else:
                    next_frontier.extend((c, w / 2) for c in _children(center, w))
            frontier = next_frontier
            if not frontier:
                break
        else:
            unresolved = bool(frontier)
        if unresolved:
            log.debug("carve_compact: attempt %d left %d boxes unresolved", attempt, len(frontier))
            continue
        if not kept:
            log.debug("carve_compact: Î_i ⊆ U, S' is the whole restriction")
            return restrict_to_ball(S, i)
        m = union_code_of(kept)
        log.debug("carve_compact: removal cover of %d balls", len(kept))
        return restrict_to_ball(subtract_union(S, m), i)
    raise search_failure(fuel, "carve_compact", "a quadtree removal cover", k_cover)


def _bounding_code(Ssc: SemicompactSet, fuel: Fuel) -> tuple[int, Ball]:
    origin = tuple(Fraction(0) for _ in range(Ssc.dim))
    for stage in range(APPROX_MAX_STAGE + 1):
        for e in range(BOUNDING_SEARCH_MAX_EXP + 1):
            fuel.spend(1, "approximate")
            ball = Ball(origin, Fraction(1 << e))
            if Ssc.covers_at(union_code_of([ball]), stage):
                return e, ball
    raise search_failure(fuel, "approximate", "a bounding ball", 0)


def approximate(Sce: CeClosedSet, Ssc: SemicompactSet, k: int, fuel) -> list[Point]:
    """Finite P with S ≈_{2^-k} P for S both c.e. and semicompact.

    Quadtree boxes are kept while their balls are confirmed to hit S; the
    final balls (radius < 2^-k-1) must then be confirmed to cover S.
    """
    fuel = as_fuel(fuel)
    dim = Ssc.dim
    e, _ = _bounding_code(Ssc, fuel)
    target = Fraction(1, 1 << (k + 1))
    for stage in range(APPROX_MAX_STAGE + 1):
        w = Fraction(1 << e)
        boxes = [tuple(Fraction(0) for _ in range(dim))]
        while True:
            r = box_radius(w, dim)
            kept = []
            for center in boxes:
                fuel.spend(1, "approximate")
                if Sce.hits_ball_at(Ball(center, r), stage):
                    kept.append(center)
            boxes = kept
            if r < target or not boxes:
                break
            boxes = [c for center in boxes for c in _children(center, w)]
            w = w / 2
        if not boxes:
            continue
        fuel.spend(1, "approximate")
        j = union_code_of(Ball(c, r) for c in boxes)
        if Ssc.covers_at(j, stage):
            log.debug("approximate: k=%d certified at stage %d with %d balls", k, stage, len(boxes))
            return sorted(boxes)
    raise search_failure(fuel, "approximate", "the final box cover", k + 1)


def separator_search(A: ComputableCompactSet, eps, fuel, radius: Optional[Fraction] = None) -> UnionCode:
    """A union code j with A ⊆_eps J_j; ball radii are at most `radius` when given."""
    fuel = as_fuel(fuel)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    rho = eps / 2 if radius is None else min(eps / 2, Fraction(radius))
    k = level_for(rho / 4)
    fuel.spend(1, "separator_search")
    half = rho / 2
    kept: list[Point] = []
    thin = SpaceHash([], div=half)
    for p in A.points(k):
        close = any(sq_dist(p, kept[q]) <= half * half for q in thin.near(p, half))
        if not close:
            kept.append(p)
            thin.add(Ball(p, half))
    j = union_code_of(Ball(p, rho) for p in kept)
    if subset_eps_semidecide(A, eps, j, fuel) is Verdict.YES:
        return j
    raise search_failure(fuel, "separator_search", "A ⊆_eps J_j", k)

