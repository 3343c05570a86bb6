"""
Exact geometry over Q^n: balls, closeness, Hausdorff comparisons, computable
points, and the comparison kernel for expressions p + q*sqrt(r).

Distances are carried as squared rationals. The only irrational quantities
the toolkit compares (centre distances, formal diameters) have the form
p + q*sqrt(r), and cmp_quad orders two of them exactly by repeated squaring.
No floating point is involved anywhere in a decision.
"""

import enum
import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

from src.config import DEFAULT_DIM
from src.encoding import Point, alpha, as_point, index_of_point, index_of_qpos, pair, qpos, tau


class Cmp(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Bound(enum.Enum):
    LESS = "LESS"
    GEQ = "GEQ"


# ---------------------------------------------------------------------------
# Rational helpers
# ---------------------------------------------------------------------------

def sq_dist(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    """Squared Euclidean distance."""
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    total = Fraction(0)
    for a, b in zip(p, q):
        d = a - b
        total += d * d
    return total


def ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def level_for(r) -> int:
    """Least m >= 0 with 2^-m <= r."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError(f"level_for() needs a positive rational, got {r}")
    if r >= 1:
        return 0
    m = max(0, (r.denominator // r.numerator).bit_length() - 1)
    while (r.numerator << m) < r.denominator:
        m += 1
    return m


def dyadic_below(c) -> Fraction:
    """Largest 2^-m (m >= 0) strictly below c; 1 when c > 1."""
    c = Fraction(c)
    if c <= 0:
        raise ValueError(f"dyadic_below() needs a positive rational, got {c}")
    if c > 1:
        return Fraction(1)
    m = level_for(c)
    h = Fraction(1, 1 << m)
    return h / 2 if h == c else h


def sqrt_lower(x, k: int) -> Fraction:
    """Rational l with l <= sqrt(x) < l + 2^-k."""
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"sqrt of a negative rational: {x}")
    scale = 1 << (max(k, 0) + 1)
    return Fraction(math.isqrt(math.floor(x * scale * scale)), scale)


def sqrt_upper(x, k: int) -> Fraction:
    """Rational u with sqrt(x) <= u < sqrt(x) + 2^-k."""
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"sqrt of a negative rational: {x}")
    scale = 1 << (max(k, 0) + 1)
    n = math.ceil(x * scale * scale)
    m = math.isqrt(n)
    if m * m < n:
        m += 1
    return Fraction(m, scale)


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# p + q*sqrt(r)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadExpr:
    """The real number p + q*sqrt(r) with rational p, q and r >= 0.

    Canonical form: q = r = 0 when the root vanishes, and a perfect-square r
    is folded into p.
    """

    p: Fraction
    q: Fraction = Fraction(0)
    r: Fraction = Fraction(0)

    def __post_init__(self):
        p, q, r = Fraction(self.p), Fraction(self.q), Fraction(self.r)
        if r < 0:
            raise ValueError(f"QuadExpr needs r >= 0, got {r}")
        if q == 0 or r == 0:
            q, r = Fraction(0), Fraction(0)
        else:
            rn, rd = math.isqrt(r.numerator), math.isqrt(r.denominator)
            if rn * rn == r.numerator and rd * rd == r.denominator:
                p, q, r = p + q * Fraction(rn, rd), Fraction(0), Fraction(0)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def sqrt_of(cls, x) -> "QuadExpr":
        return cls(Fraction(0), Fraction(1), Fraction(x))

    def scaled(self, c) -> "QuadExpr":
        c = Fraction(c)
        return QuadExpr(c * self.p, c * self.q, self.r)

    def shifted(self, c) -> "QuadExpr":
        return QuadExpr(self.p + Fraction(c), self.q, self.r)

    def _root_precision(self, k: int) -> int:
        return k + math.ceil(abs(self.q)).bit_length()

    def lower(self, k: int) -> Fraction:
        """Rational below the value by less than 2^-k."""
        if self.q == 0:
            return self.p
        kk = self._root_precision(k)
        root = sqrt_lower(self.r, kk) if self.q > 0 else sqrt_upper(self.r, kk)
        return self.p + self.q * root

    def upper(self, k: int) -> Fraction:
        """Rational above the value by less than 2^-k."""
        if self.q == 0:
            return self.p
        kk = self._root_precision(k)
        root = sqrt_upper(self.r, kk) if self.q > 0 else sqrt_lower(self.r, kk)
        return self.p + self.q * root


def _sign_root(p: Fraction, q: Fraction, r: Fraction) -> int:
    """Sign of p + q*sqrt(r)."""
    sp = _sgn(p)
    sq = _sgn(q) if r > 0 else 0
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    return sp * _sgn(p * p - q * q * r)


def _sign_two_roots(a: Fraction, b: Fraction, r: Fraction, c: Fraction, s: Fraction) -> int:
    """Sign of a + b*sqrt(r) + c*sqrt(s)."""
    su = _sgn(b) if r > 0 else 0
    sv = _sgn(c) if s > 0 else 0
    if su == 0:
        return _sign_root(a, c, s)
    if sv == 0:
        return _sign_root(a, b, r)
    sx = su if su == sv else su * _sgn(b * b * r - c * c * s)
    sa = _sgn(a)
    if sx == 0:
        return sa
    if sa == 0 or sa == sx:
        return sx
    # opposite signs: compare a^2 with (b sqrt r + c sqrt s)^2
    return sa * _sign_root(a * a - b * b * r - c * c * s, -2 * b * c, r * s)


def cmp_quad(x: QuadExpr, y: QuadExpr) -> Cmp:
    """Exact order of two QuadExpr values."""
    dp = x.p - y.p
    if x.r == y.r:
        sign = _sign_root(dp, x.q - y.q, x.r)
    else:
        sign = _sign_two_roots(dp, x.q, x.r, -y.q, y.r)
    return Cmp(sign)


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    """Open rational ball B(center, radius); its closed hull is the closed ball."""

    center: Point
    radius: Fraction

    def __post_init__(self):
        center = self.center
        if not all(type(c) is Fraction for c in center):
            center = tuple(Fraction(c) for c in center)
            object.__setattr__(self, "center", center)
        elif not isinstance(center, tuple):
            object.__setattr__(self, "center", tuple(center))
        radius = Fraction(self.radius)
        if radius <= 0:
            raise ValueError(f"ball radius must be positive, got {radius}")
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self) -> int:
        return len(self.center)

    @cached_property
    def index(self) -> int:
        return ball_index(self)

    def contains(self, point: Sequence[Fraction]) -> bool:
        return sq_dist(self.center, point) < self.radius * self.radius

    def closed_contains(self, point: Sequence[Fraction]) -> bool:
        return sq_dist(self.center, point) <= self.radius * self.radius

    def bbox(self) -> tuple[Point, Point]:
        r = self.radius
        return tuple(c - r for c in self.center), tuple(c + r for c in self.center)


def ball_of(i: int, dim: int = DEFAULT_DIM) -> Ball:
    """I_i = B(alpha(tau1(i)), q(tau2(i)))."""
    a, b = tau(i)
    return Ball(alpha(a, dim), qpos(b))


def ball_index(ball: Ball) -> int:
    """An index i with ball_of(i, dim) == ball."""
    return pair(index_of_point(ball.center), index_of_qpos(ball.radius))


def balls_disjoint(a: Ball, b: Ball) -> bool:
    """Formal disjointness: d(λa, λb) > ρa + ρb."""
    s = a.radius + b.radius
    return sq_dist(a.center, b.center) > s * s


def balls_contained(a: Ball, b: Ball) -> bool:
    """Formal containment: d(λa, λb) + ρa < ρb."""
    gap = b.radius - a.radius
    if gap <= 0:
        return False
    return sq_dist(a.center, b.center) < gap * gap


def points_bbox(points: Iterable[Sequence[Fraction]]) -> tuple[Point, Point]:
    pts = list(points)
    if not pts:
        raise ValueError("bounding box of an empty point set")
    dim = len(pts[0])
    lo = tuple(min(p[d] for p in pts) for d in range(dim))
    hi = tuple(max(p[d] for p in pts) for d in range(dim))
    return lo, hi


# ---------------------------------------------------------------------------
# Closeness of finite sets
# ---------------------------------------------------------------------------

def _finite(points: Iterable[Sequence], name: str) -> list[Point]:
    pts = [as_point(p) for p in points]
    if not pts:
        raise ValueError(f"{name} must be a nonempty finite point set")
    return pts


def _positive(value, name: str) -> Fraction:
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def eps_close(A: Iterable[Sequence], B: Iterable[Sequence], eps) -> bool:
    """A ≈_eps B: every point of each set is strictly within eps of the other."""
    A, B = _finite(A, "A"), _finite(B, "B")
    bound = QuadExpr(_positive(eps, "eps"))

    def directed(X: list[Point], Y: list[Point]) -> bool:
        return all(
            any(cmp_quad(QuadExpr.sqrt_of(sq_dist(x, y)), bound) is Cmp.LESS for y in Y)
            for x in X
        )

    return directed(A, B) and directed(B, A)


def hausdorff_sq(A: Iterable[Sequence], B: Iterable[Sequence]) -> Fraction:
    """Exact squared Hausdorff distance of two finite sets."""
    A, B = _finite(A, "A"), _finite(B, "B")
    forward = max(min(sq_dist(a, b) for b in B) for a in A)
    backward = max(min(sq_dist(a, b) for a in A) for b in B)
    return max(forward, backward)


def _cell(p: Point, side: Fraction) -> tuple[int, ...]:
    return tuple(math.floor(x / side) for x in p)


def _directed_lt(X: list[Point], Y: list[Point], c: Fraction) -> bool:
    """Every x in X has some y in Y with d(x, y) < c.

    Y is bucketed on a grid fine enough that two points in one cell are
    closer than c; cells are tried nearest first.
    """
    dim = len(X[0])
    m = math.isqrt(dim) + 1
    side = c / m
    buckets: dict[tuple[int, ...], list[Point]] = {}
    for y in Y:
        buckets.setdefault(_cell(y, side), []).append(y)
    c2 = c * c
    offsets = sorted(itertools.product(range(-m, m + 1), repeat=dim), key=lambda o: sum(v * v for v in o))
    for x in X:
        home = _cell(x, side)
        if not any(
            sq_dist(x, y) < c2
            for off in offsets
            for y in buckets.get(tuple(h + o for h, o in zip(home, off)), ())
        ):
            return False
    return True


def hausdorff_lt(A: Iterable[Sequence], B: Iterable[Sequence], c) -> bool:
    """d_H(A, B) < c, exactly."""
    c = _positive(c, "c")
    A, B = _finite(A, "A"), _finite(B, "B")
    return _directed_lt(A, B, c) and _directed_lt(B, A, c)


# ---------------------------------------------------------------------------
# Computable points
# ---------------------------------------------------------------------------

class ComputablePoint:
    """A point x given by k -> f(k) with d(x, alpha(f(k))) < 2^-k.

    Approximations are cached; the approximation function must be
    deterministic.
    """

    def __init__(self, approx: Callable[[int], int], dim: int, label: str = ""):
        self._approx = approx
        self.dim = dim
        self.label = label
        self._indices: dict[int, int] = {}
        self._points: dict[int, Point] = {}
        self._lock = threading.Lock()

    def index(self, k: int) -> int:
        if k < 0:
            raise ValueError(f"precision must be a natural, got {k}")
        with self._lock:
            if k not in self._indices:
                self._indices[k] = self._approx(k)
            return self._indices[k]

    def point(self, k: int) -> Point:
        if k not in self._points:
            self._points[k] = alpha(self.index(k), self.dim)
        return self._points[k]

    @classmethod
    def constant(cls, point: Sequence, label: str = "") -> "ComputablePoint":
        p = as_point(point)
        idx = index_of_point(p)
        return cls(lambda k: idx, len(p), label)

    @classmethod
    def from_rational_approx(cls, fn: Callable[[int], Point], dim: int, label: str = "") -> "ComputablePoint":
        return cls(lambda k: index_of_point(fn(k)), dim, label)

    def __repr__(self) -> str:
        return f"ComputablePoint({self.label or 'anonymous'}, dim={self.dim})"


def point_approx(x: ComputablePoint, k: int) -> Point:
    """alpha(f(k)): a rational point within 2^-k of x."""
    return x.point(k)
