"""
Graph fixtures: finite unions of polygonal arcs and rays with exact rational
vertices, some of whose free endpoints are hidden.

A hidden endpoint is known to the algorithms only through a shrinking
sequence of nested rational boxes (hulls) released on an emission schedule;
its exact coordinates are ground truth that only the test harness reads,
through HiddenEndpoint.reveal(), which counts every access. Validation and
serialization of the fixture file read them through fixture_data(), counted
separately in data_reads; the hull generator is the only other reader.

The fixture exposes S through the enumerator interfaces of src.sets:
  semicomputable()  Ω, certified on a stage-s over-approximation of S by cells
  ce_set()          hits, certified by sample points with error bounds
and supplies rational charts (PolylineChart, ChartWindow) for its edges.
"""

import json
import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence, Union

from src.config import (
    CHART_EPS_CAP,
    CHART_POINT_PRECISION,
    CONTINUITY_GRID_STEP,
    ISOLATION_PRECISION,
)
from src.encoding import Point, as_point, format_point, format_rational, parse_rational
from src.formal import UnionCode, union_balls
from src.metric import (
    Ball,
    ComputablePoint,
    ball_of,
    ceil_sqrt,
    level_for,
    points_bbox,
    sq_dist,
    sqrt_lower,
    sqrt_upper,
)
from src.sets import CeClosedSet, ComputableCompactSet, SemicomputableSet, cells_certify
from src.spatial import SpaceHash

log = logging.getLogger(__name__)

EDGE_KINDS = ("arc", "ray")
SIDES = ("start", "end")


# ---------------------------------------------------------------------------
# Boxes and hidden endpoints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Open axis-parallel cube."""

    center: Point
    half_width: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        half_width = parse_rational(self.half_width)
        if half_width <= 0:
            raise ValueError(f"box half_width must be positive, got {half_width}")
        object.__setattr__(self, "half_width", half_width)

    def radius_bound(self) -> Fraction:
        """A rational at least the distance from the centre to any box point."""
        return self.half_width * ceil_sqrt(len(self.center))

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(abs(p - c) < self.half_width for p, c in zip(point, self.center))

    def contains_box(self, other: "Box") -> bool:
        return all(
            abs(oc - c) + other.half_width < self.half_width
            for oc, c in zip(other.center, self.center)
        )


class HiddenEndpoint:
    """An endpoint known only through nested hulls.

    hull(k) is an open box containing the endpoint; hulls are strictly nested
    and their widths decrease to 0. Explicit hulls come from the fixture file;
    later hulls are generated around the truth. A fixture at resolution r may
    only use hull(available_level(r)).
    """

    def __init__(self, truth: Point, width: Fraction, delay: int = 0, hulls: Sequence[Box] = ()):
        self._truth = as_point(truth)
        self.width = parse_rational(width)
        if self.width <= 0:
            raise ValueError(f"hidden endpoint width must be positive, got {self.width}")
        if delay < 0:
            raise ValueError(f"hidden endpoint delay must be a natural, got {delay}")
        self.delay = delay
        self._explicit = list(hulls)
        self.emissions = 0
        self.reveals = 0
        self.data_reads = 0
        self._lock = threading.Lock()
        self._validate_hulls()
        if self._explicit:
            last = self._explicit[-1]
            margin = min(last.half_width - abs(t - c) for t, c in zip(self._truth, last.center))
            self._generated_width = margin / 2
        else:
            self._generated_width = self.width

    def _validate_hulls(self) -> None:
        for pos, box in enumerate(self._explicit):
            if len(box.center) != len(self._truth):
                raise ValueError(f"hull {pos} has dimension {len(box.center)}, expected {len(self._truth)}")
            if not box.contains(self._truth):
                raise ValueError(f"hull {pos} does not strictly contain the hidden endpoint")
            if pos and not self._explicit[pos - 1].contains_box(box):
                raise ValueError(f"hulls {pos - 1} and {pos} are not strictly nested")
            if pos and not box.half_width < self._explicit[pos - 1].half_width:
                raise ValueError(f"hull {pos} does not shrink")

    @property
    def dim(self) -> int:
        return len(self._truth)

    @property
    def explicit_hulls(self) -> list[Box]:
        return list(self._explicit)

    def available_level(self, resolution: int) -> int:
        return max(0, resolution - self.delay)

    def _hull(self, level: int) -> Box:
        if level < len(self._explicit):
            return self._explicit[level]
        h = self._generated_width / (1 << (level - len(self._explicit)))
        return Box(tuple(t + h / 3 for t in self._truth), h)

    def hull(self, level: int) -> Box:
        """The level-th hull; every call counts as one emission."""
        if level < 0:
            raise ValueError(f"hull level must be a natural, got {level}")
        with self._lock:
            self.emissions += 1
        return self._hull(level)

    def approx_within(self, bound: Fraction) -> tuple[Point, Fraction]:
        """A hull centre and an error below `bound`."""
        level = 0
        while True:
            box = self.hull(level)
            if box.radius_bound() < bound:
                return box.center, box.radius_bound()
            level += 1

    def reveal(self) -> Point:
        """Ground truth for test oracles; counted."""
        with self._lock:
            self.reveals += 1
        return self._truth

    def fixture_data(self) -> Point:
        """Exact coordinates for the fixture's own validation and serialization; counted in `data_reads`."""
        with self._lock:
            self.data_reads += 1
        return self._truth

    def __repr__(self) -> str:
        return f"HiddenEndpoint(width={format_rational(self.width)}, delay={self.delay})"


Vertex = Union[Point, HiddenEndpoint]


def _vertex_approx(v: Vertex, level: int) -> tuple[Point, Fraction]:
    if isinstance(v, HiddenEndpoint):
        box = v.hull(level)
        return box.center, box.radius_bound()
    return v, Fraction(0)


def _vertex_reference(v: Vertex) -> Point:
    return v.hull(0).center if isinstance(v, HiddenEndpoint) else v


def _vertex_truth(v: Vertex) -> Point:
    return v.fixture_data() if isinstance(v, HiddenEndpoint) else v


# ---------------------------------------------------------------------------
# Exact segment geometry
# ---------------------------------------------------------------------------

def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def _lerp(a: Sequence[Fraction], b: Sequence[Fraction], lam: Fraction) -> Point:
    return tuple(x + lam * (y - x) for x, y in zip(a, b))


def _clamp(t: Fraction, unbounded: bool) -> Fraction:
    if t < 0:
        return Fraction(0)
    if not unbounded and t > 1:
        return Fraction(1)
    return t


def point_segment_sq_dist(p: Sequence[Fraction], a: Sequence[Fraction], b: Sequence[Fraction], unbounded: bool = False) -> Fraction:
    """Squared distance from p to the segment [a, b] (the ray from a through b if unbounded)."""
    u = _sub(b, a)
    uu = _dot(u, u)
    if uu == 0:
        return sq_dist(p, a)
    t = _clamp(_dot(_sub(p, a), u) / uu, unbounded)
    return sq_dist(p, _lerp(a, b, t))


def segment_sq_dist(
    a0: Sequence[Fraction],
    a1: Sequence[Fraction],
    b0: Sequence[Fraction],
    b1: Sequence[Fraction],
    a_unbounded: bool = False,
    b_unbounded: bool = False,
) -> Fraction:
    """Exact squared distance between two segments (or rays).

    The minimum of the convex quadratic |a0 + s u - b0 - t v|^2 is either the
    interior critical point or lies on an edge of the parameter domain.
    """
    u, v, w = _sub(a1, a0), _sub(b1, b0), _sub(a0, b0)
    a, b, c = _dot(u, u), _dot(u, v), _dot(v, v)
    d, e = _dot(u, w), _dot(v, w)
    candidates = [
        point_segment_sq_dist(a0, b0, b1, b_unbounded),
        point_segment_sq_dist(b0, a0, a1, a_unbounded),
    ]
    if not a_unbounded:
        candidates.append(point_segment_sq_dist(a1, b0, b1, b_unbounded))
    if not b_unbounded:
        candidates.append(point_segment_sq_dist(b1, a0, a1, a_unbounded))
    det = a * c - b * b
    if det != 0:
        s = (b * e - c * d) / det
        t = (a * e - b * d) / det
        if s >= 0 and t >= 0 and (a_unbounded or s <= 1) and (b_unbounded or t <= 1):
            candidates.append(sq_dist(_lerp(a0, a1, s), _lerp(b0, b1, t)))
    return min(candidates)


def _parallel_same_way(u: Sequence[Fraction], v: Sequence[Fraction]) -> bool:
    uv = _dot(u, v)
    return uv > 0 and uv * uv == _dot(u, u) * _dot(v, v)


def _clip(
    origin: Sequence[Fraction],
    direction: Sequence[Fraction],
    lo: Sequence[Fraction],
    hi: Sequence[Fraction],
    margin: Fraction,
    t0: Fraction,
    t1: Optional[Fraction],
) -> Optional[tuple[Fraction, Fraction]]:
    """Parameter range of origin + t*direction inside the box [lo, hi] grown by margin."""
    for p, dd, l, h in zip(origin, direction, lo, hi):
        l, h = l - margin, h + margin
        if dd == 0:
            if p < l or p > h:
                return None
            continue
        ta, tb = (l - p) / dd, (h - p) / dd
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = tb if t1 is None else min(t1, tb)
    if t1 is None or t0 > t1:
        return None
    return t0, t1


# ---------------------------------------------------------------------------
# Edges and segments
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Segment:
    edge_id: str
    index: int
    a: Vertex
    b: Vertex
    unbounded: bool = False

    def approx(self, level: int) -> tuple[Point, Fraction, Point, Fraction]:
        """Endpoint approximations from hulls at `level`, with error bounds."""
        pa, ea = _vertex_approx(self.a, level)
        pb, eb = _vertex_approx(self.b, level)
        return pa, ea, pb, eb

    def scheduled(self, resolution: int) -> tuple[Point, Fraction, Point, Fraction]:
        """Endpoint approximations available at `resolution` under the emission schedule."""
        def level_of(v: Vertex) -> int:
            return v.available_level(resolution) if isinstance(v, HiddenEndpoint) else 0

        pa, ea = _vertex_approx(self.a, level_of(self.a))
        pb, eb = _vertex_approx(self.b, level_of(self.b))
        return pa, ea, pb, eb


@dataclass
class Edge:
    """A polygonal arc, or a ray whose last two vertices fix its direction."""

    id: str
    kind: str
    vertices: list
    hidden: dict = field(default_factory=dict)

    def segments(self) -> list[Segment]:
        vs = self.vertices
        if self.kind == "arc":
            return [Segment(self.id, s, vs[s], vs[s + 1]) for s in range(len(vs) - 1)]
        segs = [Segment(self.id, s, vs[s], vs[s + 1]) for s in range(len(vs) - 2)]
        segs.append(Segment(self.id, len(vs) - 2, vs[-2], vs[-1], unbounded=True))
        return segs

    def endpoint(self, side: str) -> Vertex:
        return self.vertices[0] if side == "start" else self.vertices[-1]


# ---------------------------------------------------------------------------
# The fixture
# ---------------------------------------------------------------------------

class GraphFixture:
    """A finite graph of arcs and rays satisfying the defining-family condition."""

    def __init__(self, name: str, dim: int, edges: Sequence[Edge]):
        self.name = name
        self.dim = dim
        self.edges = list(edges)
        self._by_id = {e.id: e for e in self.edges}
        self._segments = [s for e in self.edges for s in e.segments()]
        self._samples_cached = lru_cache(maxsize=64)(self._build_samples)

    @property
    def has_rays(self) -> bool:
        return any(e.kind == "ray" for e in self.edges)

    def edge(self, edge_id: str) -> Edge:
        if edge_id not in self._by_id:
            raise ValueError(f"fixture {self.name!r} has no edge {edge_id!r}")
        return self._by_id[edge_id]

    def segments(self) -> list[Segment]:
        return list(self._segments)

    def hidden_endpoints(self) -> list[tuple[str, str, HiddenEndpoint]]:
        return [(e.id, side, h) for e in self.edges for side, h in sorted(e.hidden.items())]

    # -- stage over-approximation -------------------------------------------

    def _build_samples(self, level: int, window) -> tuple[tuple[Point, Fraction, Fraction], ...]:
        spacing = Fraction(1, 1 << level)
        out = []
        for seg in self._segments:
            pa, ea, pb, eb = seg.scheduled(level)
            direction = _sub(pb, pa)
            t0, t1 = Fraction(0), (None if seg.unbounded else Fraction(1))
            if window is not None:
                clipped = _clip(pa, direction, window[0], window[1], spacing + max(ea, eb), t0, t1)
                if clipped is None:
                    continue
                t0, t1 = clipped
            elif t1 is None:
                raise ValueError(f"edge {seg.edge_id!r} is a ray; sampling it needs a window")
            length = sum((abs(d) for d in direction), Fraction(0))
            n_steps = max(1, math.ceil((t1 - t0) * length / spacing))
            dt = (t1 - t0) / n_steps
            slope = abs(eb - ea) * dt / 2
            for step in range(n_steps + 1):
                lam = t0 + step * dt
                err = (1 - lam) * ea + lam * eb
                out.append((_lerp(pa, pb, lam), err, spacing + err + slope))
        return tuple(out)

    def samples(self, level: int, window: Optional[tuple[Point, Point]] = None):
        """(point, error, cell radius) triples: each point is within `error` of S,
        and the open cells of the given radii cover S (inside the window)."""
        if window is not None:
            window = (tuple(window[0]), tuple(window[1]))
        return self._samples_cached(level, window)

    def cells(self, level: int, window: Optional[tuple[Point, Point]] = None) -> list[Ball]:
        """Open balls covering S ∩ window at resolution 2^-level."""
        return [Ball(p, r) for p, _, r in self.samples(level, window)]

    # -- representations ----------------------------------------------------

    def semicomputable(self) -> "FixtureSet":
        return FixtureSet(self)

    def ce_set(self) -> "FixtureCeSet":
        return FixtureCeSet(self)

    def bounding_ball(self) -> Ball:
        """A rational ball containing S in its interior (compact fixtures only)."""
        if self.has_rays:
            raise ValueError(f"fixture {self.name!r} has rays and is not bounded")
        corners = []
        for e in self.edges:
            for v in e.vertices:
                if isinstance(v, HiddenEndpoint):
                    box = v.hull(0)
                    corners.append(tuple(c - box.half_width for c in box.center))
                    corners.append(tuple(c + box.half_width for c in box.center))
                else:
                    corners.append(v)
        lo, hi = points_bbox(corners)
        center = tuple((a + b) / 2 for a, b in zip(lo, hi))
        far = max(sq_dist(center, p) for p in corners)
        return Ball(center, sqrt_upper(far, 4) + 1)

    def chart(self, edge_id: str, from_end: str = "start") -> "PolylineChart":
        edge = self.edge(edge_id)
        if from_end not in SIDES:
            raise ValueError(f"from_end must be one of {SIDES}, got {from_end!r}")
        if edge.kind == "ray" and from_end == "end":
            raise ValueError(f"ray {edge_id!r} can only be charted from its start")
        return PolylineChart(self, edge, reverse=(from_end == "end"))


class FixtureSet(SemicomputableSet):
    """Ω of a fixture: at stage s, Î_i ∩ S ⊆ J_j is certified on cells of S ∩ box(Î_i)."""

    def __init__(self, fixture: GraphFixture):
        super().__init__(fixture.dim)
        self.fixture = fixture
        self._hashes: dict[int, SpaceHash] = {}

    def _union_index(self, j: UnionCode) -> SpaceHash:
        if j not in self._hashes:
            self._hashes[j] = SpaceHash(union_balls(j, self.dim))
        return self._hashes[j]

    def omega_at(self, i: int, j: UnionCode, stage: int) -> bool:
        ball = ball_of(i, self.dim)
        union = self._union_index(j)
        level = stage + level_for(min(b.radius for b in union.balls)) + 2
        cells = (Ball(p, r) for p, _, r in self.fixture.samples(level, ball.bbox()))
        return cells_certify(cells, ball, union)


class FixtureCeSet(CeClosedSet):
    """hits of a fixture: some sample point lies in I_i with room for its error."""

    def __init__(self, fixture: GraphFixture):
        super().__init__(fixture.dim)
        self.fixture = fixture

    def hits_at(self, i: int, stage: int) -> bool:
        return self.hits_ball_at(ball_of(i, self.dim), stage)

    def hits_ball_at(self, ball: Ball, stage: int) -> bool:
        level = stage + level_for(ball.radius) + 1
        for p, err, _ in self.fixture.samples(level, ball.bbox()):
            room = ball.radius - err
            if room > 0 and sq_dist(p, ball.center) < room * room:
                return True
        return False


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------

def _l1(u: Sequence[Fraction]) -> Fraction:
    return sum((abs(x) for x in u), Fraction(0))


class PolylineChart:
    """F: [0, total] -> S along one edge, parametrised by L1 length.

    Shares of segments with a hidden endpoint are measured to the centre of
    its first hull; `lipschitz` bounds the Euclidean speed of F.
    """

    def __init__(self, fixture: GraphFixture, edge: Edge, reverse: bool = False):
        self.fixture = fixture
        self.edge = edge
        self.dim = fixture.dim
        vertices = list(reversed(edge.vertices)) if reverse else list(edge.vertices)
        self.vertices = vertices
        self.unbounded = edge.kind == "ray"
        n_bounded = len(vertices) - (2 if self.unbounded else 1)
        self.shares: list[Fraction] = []
        self.lipschitz = Fraction(1)
        for s in range(n_bounded):
            a, b = vertices[s], vertices[s + 1]
            share = _l1(_sub(_vertex_reference(b), _vertex_reference(a)))
            slack = sum(
                (v.hull(0).half_width * self.dim for v in (a, b) if isinstance(v, HiddenEndpoint)),
                Fraction(0),
            )
            self.shares.append(share)
            self.lipschitz = max(self.lipschitz, 1 + slack / share)
        self.starts = [sum(self.shares[:s], Fraction(0)) for s in range(n_bounded)]
        self.total: Optional[Fraction] = None if self.unbounded else sum(self.shares, Fraction(0))
        self.bounded_length = sum(self.shares, Fraction(0))
        if self.unbounded:
            self.ray_share = _l1(_sub(vertices[-1], vertices[-2]))

    @property
    def first_share(self) -> Fraction:
        return self.shares[0] if self.shares else self.ray_share

    def _locate(self, u: Fraction) -> tuple[int, Fraction]:
        u = Fraction(u)
        if u < 0 or (self.total is not None and u > self.total):
            raise ValueError(f"chart parameter {u} outside the edge {self.edge.id!r}")
        for s, (start, share) in enumerate(zip(self.starts, self.shares)):
            if u <= start + share:
                return s, (u - start) / share
        return len(self.shares), (u - self.bounded_length) / self.ray_share

    def _segment_vertices(self, s: int) -> tuple[Vertex, Vertex]:
        return self.vertices[s], self.vertices[s + 1]

    def point(self, u, k: int) -> Point:
        """A rational point within 2^-k of F(u)."""
        s, lam = self._locate(u)
        a, b = self._segment_vertices(s)
        bound = Fraction(1, 1 << k)
        pa = a.approx_within(bound)[0] if isinstance(a, HiddenEndpoint) else a
        pb = b.approx_within(bound)[0] if isinstance(b, HiddenEndpoint) else b
        return _lerp(pa, pb, lam)

    def piece(self, u0, u1, label: str = "") -> ComputableCompactSet:
        """F([u0, u1]) as a computable compact set."""
        u0, u1 = Fraction(u0), Fraction(u1)
        if u1 < u0:
            raise ValueError(f"empty chart interval [{u0}, {u1}]")
        span = self.lipschitz * (u1 - u0)

        def sampler(k: int) -> list[Point]:
            n = max(1, math.ceil(span * (1 << (k + 1))))
            return [self.point(u0 + (u1 - u0) * t / n, k + 1) for t in range(n + 1)]

        return ComputableCompactSet(sampler, self.dim, label or f"{self.edge.id}[{u0},{u1}]")

    def _pieces(self, u0: Fraction, u1: Optional[Fraction], level: int):
        """Approximate sub-segments of F([u0, u1]) as (p, q, err, unbounded)."""
        out = []
        for s, (start, share) in enumerate(zip(self.starts, self.shares)):
            lo, hi = max(u0, start), share + start if u1 is None else min(u1, start + share)
            if lo > hi:
                continue
            a, b = self._segment_vertices(s)
            pa, ea = _vertex_approx(a, level)
            pb, eb = _vertex_approx(b, level)
            out.append((_lerp(pa, pb, (lo - start) / share), _lerp(pa, pb, (hi - start) / share), max(ea, eb), False))
        if self.unbounded and (u1 is None or u1 > self.bounded_length):
            a, b = self.vertices[-2], self.vertices[-1]
            lam0 = max(Fraction(0), (u0 - self.bounded_length) / self.ray_share)
            p = _lerp(a, b, lam0)
            if u1 is None:
                out.append((p, tuple(x + d for x, d in zip(p, _sub(b, a))), Fraction(0), True))
            else:
                out.append((p, _lerp(a, b, (u1 - self.bounded_length) / self.ray_share), Fraction(0), False))
        return out

    def isolation(self, inner: tuple, outer: tuple, level: int = ISOLATION_PRECISION) -> Optional[Fraction]:
        """Lower bound on d(F([a, b]), S \\ F(<c, d>)) for inner = (a, b), outer = (c, d).

        c = None means the outer interval starts at the chart origin
        (inclusive); d = None means it runs to the far end. Returns None when
        S \\ F(<c, d>) is empty. Hulls and square roots are taken at `level`.
        """
        a, b = (Fraction(x) for x in inner)
        c, d = outer
        near = self._pieces(a, b, level)
        rest = []
        if c is not None:
            rest += self._pieces(Fraction(0), Fraction(c), level)
        if d is not None and (self.total is None or Fraction(d) < self.total):
            rest += self._pieces(Fraction(d), None, level)
        for seg in self.fixture.segments():
            if seg.edge_id == self.edge.id:
                continue
            pa, ea, pb, eb = seg.approx(level)
            rest.append((pa, pb, max(ea, eb), seg.unbounded))
        if not rest:
            return None
        best = None
        for p, q, e1, r1 in near:
            for x, y, e2, r2 in rest:
                d2 = segment_sq_dist(p, q, x, y, r1, r2)
                bound = sqrt_lower(d2, level) - e1 - e2
                if best is None or bound < best:
                    best = bound
        return best


    def window_end(self, radius) -> Fraction:
        """Least u with F([u, end)) outside the open box (-radius, radius)^n; the total length for arcs."""
        if not self.unbounded:
            return self.total
        radius = Fraction(radius)
        a, b = self.vertices[-2], self.vertices[-1]
        lo = tuple(-radius for _ in a)
        hi = tuple(radius for _ in a)
        clipped = _clip(a, _sub(b, a), lo, hi, Fraction(0), Fraction(0), None)
        if clipped is None:
            return self.bounded_length
        return self.bounded_length + clipped[1] * self.ray_share


class ChartWindow:
    """g(s) = F(u0 + s·delta) on [-4, 4]."""

    def __init__(self, chart: PolylineChart, u0, delta):
        self.chart = chart
        self.u0 = Fraction(u0)
        self.delta = Fraction(delta)
        if self.delta <= 0:
            raise ValueError(f"chart window step must be positive, got {self.delta}")
        if self.u0 - 4 * self.delta < 0 or (chart.total is not None and self.u0 + 4 * self.delta > chart.total):
            raise ValueError(
                f"window [{self.u0 - 4 * self.delta}, {self.u0 + 4 * self.delta}] leaves edge {chart.edge.id!r}"
            )
        self.dim = chart.dim
        self.lipschitz = chart.lipschitz * self.delta
        self._eps: Optional[Fraction] = None

    def param(self, s) -> Fraction:
        return self.u0 + Fraction(s) * self.delta

    def point(self, s, k: int) -> Point:
        return self.chart.point(self.param(s), k)

    def computable_point(self, s, label: str = "") -> ComputablePoint:
        s = Fraction(s)
        return ComputablePoint.from_rational_approx(lambda k: self.point(s, k), self.dim, label or f"g({s})")

    def piece(self, s0, s1, label: str = "") -> ComputableCompactSet:
        return self.chart.piece(self.param(s0), self.param(s1), label)

    def tube(self, s0, s1, radius) -> list[Ball]:
        """Open balls of the given radius centred near g([s0, s1]), every true point
        of g([s0, s1]) lying within 3/8 of the radius from some centre."""
        s0, s1, radius = Fraction(s0), Fraction(s1), Fraction(radius)
        k = level_for(radius / 4)
        n = max(1, math.ceil(self.lipschitz * (s1 - s0) * 4 / radius))
        centers = dict.fromkeys(self.point(s0 + (s1 - s0) * t / n, k) for t in range(n + 1))
        return [Ball(c, radius) for c in centers]

    def affine(self) -> bool:
        """Whether g([-4, 4]) lies on a single segment (or on the ray part) of the chart."""
        lo, hi = self.param(-4), self.param(4)
        c = self.chart
        if any(start <= lo and hi <= start + share for start, share in zip(c.starts, c.shares)):
            return True
        return c.unbounded and lo >= c.bounded_length

    def speed_bounds(self) -> tuple[Fraction, Fraction]:
        """lo <= |g'| <= hi on an affine window, from approximations of g(-4) and g(4)."""
        if not self.affine():
            raise ValueError(f"chart window on edge {self.chart.edge.id!r} crosses a vertex")
        k = CHART_POINT_PRECISION + level_for(self.lipschitz)
        d2 = sq_dist(self.point(-4, k), self.point(4, k))
        err = Fraction(2, 1 << k)
        lo = (sqrt_lower(d2, k) - err) / 8
        if lo <= 0:
            raise ValueError(f"chart window on edge {self.chart.edge.id!r} is too short for a speed bound")
        return lo, (sqrt_upper(d2, k) + err) / 8

    def isolation(self, inner: tuple, outer: tuple) -> Optional[Fraction]:
        c, d = outer
        return self.chart.isolation(
            (self.param(inner[0]), self.param(inner[1])),
            (None if c is None else self.param(c), None if d is None else self.param(d)),
            ISOLATION_PRECISION + level_for(self.lipschitz),
        )

    def continuity_eps(self) -> Fraction:
        """A dyadic eps <= 1/2 with d(g(s), g(t)) < eps implying |s - t| < 1/2 on [-4, 4]."""
        if self._eps is not None:
            return self._eps
        h = CONTINUITY_GRID_STEP
        k = CHART_POINT_PRECISION + level_for(self.lipschitz)
        n = int(8 / h)
        grid = [self.point(-4 + i * h, k) for i in range(n + 1)]
        gap = math.ceil((Fraction(1, 2) - h) / h)
        closest = None
        for i in range(n + 1):
            for j in range(i + gap, n + 1):
                d2 = sq_dist(grid[i], grid[j])
                if closest is None or d2 < closest:
                    closest = d2
        eps = sqrt_lower(closest, k) - Fraction(2, 1 << k) - self.lipschitz * h
        if eps <= 0:
            raise ValueError(f"chart window on edge {self.chart.edge.id!r} is too coarse for a continuity bound")
        eps = min(eps, CHART_EPS_CAP)
        self._eps = Fraction(1, 1 << level_for(eps))
        log.debug("continuity eps %s on edge %s", self._eps, self.chart.edge.id)
        return self._eps


# ---------------------------------------------------------------------------
# Loading, validation, serialization
# ---------------------------------------------------------------------------

def _field(data: dict, key: str, where: str):
    if key not in data:
        raise ValueError(f"{where}: missing field {key!r}")
    return data[key]


def _parse_point(values, dim: int, where: str) -> Point:
    if not isinstance(values, list) or len(values) != dim:
        raise ValueError(f"{where}: expected a list of {dim} rationals, got {values!r}")
    try:
        return as_point(values)
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from exc


def _parse_hidden(raw: dict, truth: Point, dim: int, where: str) -> HiddenEndpoint:
    try:
        width = parse_rational(_field(raw, "width", where))
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from exc
    delay = raw.get("delay", 0)
    if isinstance(delay, bool) or not isinstance(delay, int):
        raise ValueError(f"{where}: delay must be an int, got {delay!r}")
    hulls = []
    for pos, h in enumerate(raw.get("hulls", [])):
        hwhere = f"{where}.hulls[{pos}]"
        center = _parse_point(_field(h, "center", hwhere), dim, f"{hwhere}.center")
        try:
            hulls.append(Box(center, parse_rational(_field(h, "half_width", hwhere))))
        except ValueError as exc:
            raise ValueError(f"{hwhere}: {exc}") from exc
    try:
        return HiddenEndpoint(truth, width, delay, hulls)
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from exc


def _parse_edge(data: dict, dim: int, pos: int) -> Edge:
    where = f"edges[{pos}]"
    edge_id = str(_field(data, "id", where))
    where = f"edge {edge_id!r}"
    kind = _field(data, "kind", where)
    if kind not in EDGE_KINDS:
        raise ValueError(f"{where}: kind must be one of {EDGE_KINDS}, got {kind!r}")
    raw = _field(data, "points", where)
    if not isinstance(raw, list) or len(raw) < 2:
        raise ValueError(f"{where}: needs at least two points")
    points = [_parse_point(p, dim, f"{where}.points[{n}]") for n, p in enumerate(raw)]
    hidden_spec = data.get("hidden", {})
    unknown = set(hidden_spec) - set(SIDES)
    if unknown:
        raise ValueError(f"{where}: hidden sides must be among {SIDES}, got {sorted(unknown)}")
    hidden = {}
    for side in SIDES:
        if side in hidden_spec:
            idx = 0 if side == "start" else len(points) - 1
            hidden[side] = _parse_hidden(hidden_spec[side], points[idx], dim, f"{where}.hidden.{side}")
    if kind == "ray":
        if "end" in hidden:
            raise ValueError(f"{where}: a ray has no end point to hide")
        if "start" in hidden and len(points) < 3:
            raise ValueError(f"{where}: a ray with a hidden start needs at least three points")
    vertices: list = list(points)
    if "start" in hidden:
        vertices[0] = hidden["start"]
    if "end" in hidden:
        vertices[-1] = hidden["end"]
    return Edge(edge_id, kind, vertices, hidden)


def _edge_end_points(edge: Edge) -> list[Point]:
    ends = [edge.vertices[0]] if edge.kind == "ray" else [edge.vertices[0], edge.vertices[-1]]
    return [v for v in ends if not isinstance(v, HiddenEndpoint)]


def _shared_vertex(s: Segment, t: Segment) -> Optional[tuple[Vertex, Vertex, Vertex]]:
    """The common vertex of s and t with their far ends, if they share exactly one."""
    for v, far_s in ((s.a, s.b), (s.b, s.a)):
        for w, far_t in ((t.a, t.b), (t.b, t.a)):
            if v is w or (not isinstance(v, HiddenEndpoint) and not isinstance(w, HiddenEndpoint) and v == w):
                return v, far_s, far_t
    return None


def _direction_from(v: Vertex, far: Vertex) -> Point:
    return _sub(_vertex_truth(far), _vertex_truth(v))


def validate_fixture(fixture: GraphFixture) -> None:
    """Check the defining-family condition exactly on the rational data."""
    seen = set()
    for e in fixture.edges:
        if e.id in seen:
            raise ValueError(f"duplicate edge id {e.id!r}")
        seen.add(e.id)
        for s in range(len(e.vertices) - 1):
            if _vertex_truth(e.vertices[s]) == _vertex_truth(e.vertices[s + 1]):
                raise ValueError(f"edge {e.id!r}: zero-length segment at vertex {s}")
    segs = fixture.segments()
    for x in range(len(segs)):
        for y in range(x + 1, len(segs)):
            s, t = segs[x], segs[y]
            pair_name = f"{s.edge_id}[{s.index}] and {t.edge_id}[{t.index}]"
            shared = _shared_vertex(s, t)
            if shared is None:
                d2 = segment_sq_dist(
                    _vertex_truth(s.a), _vertex_truth(s.b), _vertex_truth(t.a), _vertex_truth(t.b),
                    s.unbounded, t.unbounded,
                )
                if d2 == 0:
                    raise ValueError(f"segments {pair_name} intersect away from a shared endpoint")
                continue
            v, far_s, far_t = shared
            if s.edge_id == t.edge_id and abs(s.index - t.index) != 1:
                raise ValueError(f"segments {pair_name} close a loop inside edge {s.edge_id!r}")
            if s.edge_id != t.edge_id:
                for edge_id in (s.edge_id, t.edge_id):
                    if _vertex_truth(v) not in _edge_end_points(fixture.edge(edge_id)):
                        raise ValueError(f"segments {pair_name} meet at an interior vertex of edge {edge_id!r}")
            u1 = _direction_from(v, far_s)
            u2 = _direction_from(v, far_t)
            if _parallel_same_way(u1, u2):
                raise ValueError(f"segments {pair_name} overlap")


def fixture_from_dict(data: dict, source: str = "<fixture>") -> GraphFixture:
    if not isinstance(data, dict):
        raise ValueError(f"{source}: top level must be an object")
    name = str(data.get("name", Path(source).stem))
    dim = _field(data, "dim", source)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ValueError(f"{source}: dim must be a positive int, got {dim!r}")
    raw_edges = _field(data, "edges", source)
    if not isinstance(raw_edges, list) or not raw_edges:
        raise ValueError(f"{source}: edges must be a nonempty list")
    fixture = GraphFixture(name, dim, [_parse_edge(e, dim, n) for n, e in enumerate(raw_edges)])
    validate_fixture(fixture)
    log.info("Loaded fixture %s: %d edges, %d hidden endpoints", name, len(fixture.edges), len(fixture.hidden_endpoints()))
    return fixture


def parse_fixture(path) -> GraphFixture:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"fixture not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return fixture_from_dict(data, str(path))


def _hidden_to_dict(h: HiddenEndpoint) -> dict:
    out = {"width": format_rational(h.width), "delay": h.delay}
    if h.explicit_hulls:
        out["hulls"] = [
            {"center": format_point(b.center), "half_width": format_rational(b.half_width)}
            for b in h.explicit_hulls
        ]
    return out


def fixture_to_dict(fixture: GraphFixture) -> dict:
    edges = []
    for e in fixture.edges:
        entry = {"id": e.id, "kind": e.kind, "points": [format_point(_vertex_truth(v)) for v in e.vertices]}
        if e.hidden:
            entry["hidden"] = {side: _hidden_to_dict(h) for side, h in sorted(e.hidden.items())}
        edges.append(entry)
    return {"name": fixture.name, "dim": fixture.dim, "edges": edges}


def dump_fixture(fixture: GraphFixture, path) -> Path:
    """Write the line-oriented fixture document (one edge per line)."""
    data = fixture_to_dict(fixture)
    lines = [
        "{",
        f'  "name": {json.dumps(data["name"])},',
        f'  "dim": {data["dim"]},',
        '  "edges": [',
    ]
    for n, e in enumerate(data["edges"]):
        sep = "," if n < len(data["edges"]) - 1 else ""
        lines.append(f"    {json.dumps(e)}{sep}")
    lines += ["  ]", "}"]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Harness-only ground truth
# ---------------------------------------------------------------------------

def _truth_segments(fixture: GraphFixture) -> list[tuple[Point, Point, bool]]:
    out = []
    for seg in fixture.segments():
        ends = []
        for v in (seg.a, seg.b):
            ends.append(v.reveal() if isinstance(v, HiddenEndpoint) else v)
        out.append((ends[0], ends[1], seg.unbounded))
    return out


def ground_truth_points(fixture: GraphFixture, level: int, window: Optional[tuple[Point, Point]] = None) -> list[Point]:
    """Exact points of S spaced at most 2^-level apart (inside the window). Reads hidden truth."""
    spacing = Fraction(1, 1 << level)
    out = []
    for a, b, unbounded in _truth_segments(fixture):
        direction = _sub(b, a)
        t0, t1 = Fraction(0), (None if unbounded else Fraction(1))
        if window is not None:
            clipped = _clip(a, direction, window[0], window[1], Fraction(0), t0, t1)
            if clipped is None:
                continue
            t0, t1 = clipped
        elif t1 is None:
            raise ValueError("ground truth of a ray needs a window")
        n = max(1, math.ceil((t1 - t0) * _l1(direction) / spacing))
        out.extend(_lerp(a, b, t0 + (t1 - t0) * i / n) for i in range(n + 1))
    return list(dict.fromkeys(out))


def truth_sq_distance(fixture: GraphFixture, point: Sequence[Fraction]) -> Fraction:
    """Exact squared distance from a point to S. Reads hidden truth."""
    return min(point_segment_sq_dist(point, a, b, unbounded) for a, b, unbounded in _truth_segments(fixture))
