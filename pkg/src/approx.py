"""
Computable approximation of semicomputable graphs.

Pipeline per hidden endpoint x of an edge with chart F (F(0) = x):
  cut_endpoint -> ChartWindow around F(t/2)
               -> computable_neighbourhood: carve S', seed a formal chain
                  (initial_chain), refine it stage by stage (refine_chain)
               -> z = the near end of the neighbourhood arc, S_new = (S \\ J_m) ∪ F([a, b])
approximate_graph runs the cuts for every edge (per-edge jobs through joblib)
and assembles T with computable endpoints and a closeness certificate.

Chain stages live on a halving grid over the window's middle span: stage n
has one single-ball link per grid interval of step h_0 / 2^n, and two end
links of balls growing away from the span. Every stage is certified (Ω and,
from stage 1 on, the refinement conditions) before it is handed out.
"""

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from joblib import Parallel, delayed

from src.budget import CertificationError, Fuel, SearchTimeout, Verdict, as_fuel, search_failure
from src.chains import is_formal_chain
from src.config import (
    CHAIN_CENTER_SLACK,
    CHAIN_COVER_STAGES,
    CHAIN_MAX_ATTEMPTS,
    DEFAULT_JOBS,
    DEFAULT_WINDOW,
    INFLATE_MAX_HALVINGS,
    ISOLATION_PRECISION,
    OMEGA_MAX_STAGE,
)
from src.encoding import Point
from src.fixtures import ChartWindow, GraphFixture, HiddenEndpoint, PolylineChart
from src.formal import (
    FamilyCode,
    UnionCode,
    compact_inside,
    f_contained_families,
    f_contained_unions,
    family_code_of,
    family_links,
    fmesh_cmp,
    fmesh_expr,
    point_in_union,
    point_union_distance_lt,
    union_balls,
    union_code_of,
)
from src.metric import (
    Ball,
    Bound,
    Cmp,
    ComputablePoint,
    cmp_quad,
    dyadic_below,
    level_for,
)
from src.sets import (
    ComputableCompactSet,
    SemicompactSet,
    SemicomputableSet,
    carve_compact,
    join_compacts,
    separator_search,
    subtract_union,
    union_with_compact,
)
from src.spatial import SpaceHash

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass
class NeighbourhoodContext:
    """S' with g([-3, 3]) ⊆ S' ⊆ g(<-4, 4>), the continuity eps of the window,
    and computable points ã = g(t_a), b̃ = g(t_b).

    The window must be affine; `speed` and `speed_hi` bound |g'| from both sides.
    """

    S: SemicomputableSet
    sprime: SemicompactSet
    window: ChartWindow
    eps: Fraction
    a_t: ComputablePoint
    b_t: ComputablePoint
    t_a: Fraction = Fraction(-2)
    t_b: Fraction = Fraction(2)
    speed: Optional[Fraction] = None
    speed_hi: Optional[Fraction] = None
    _ends: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.speed is None or self.speed_hi is None:
            self.speed, self.speed_hi = self.window.speed_bounds()

    @property
    def dim(self) -> int:
        return self.window.dim

    def g(self, s, k: int) -> Point:
        """A rational point within 2^-k of g(s)."""
        if k not in self._ends:
            self._ends[k] = (self.window.point(-4, k), self.window.point(4, k))
        start, end = self._ends[k]
        lam = (Fraction(s) + 4) / 8
        return tuple(a + (b - a) * lam for a, b in zip(start, end))


@dataclass(frozen=True)
class ChainStage:
    """A certified triple: (J_p, J_(l)_0, ..., J_(l)_last, J_q) is a formal chain covering S'.

    `intervals` are the grid intervals of the middle links, `step` their
    length and `span` the middle span shared by every stage of a sequence.
    """

    p: UnionCode
    l: FamilyCode
    q: UnionCode
    intervals: tuple = ()
    step: Fraction = Fraction(0)
    n: int = 0
    span: tuple = ()

    @property
    def links(self) -> tuple[UnionCode, ...]:
        return family_links(self.l)


def _link_centers(l: FamilyCode, dim: int) -> list:
    return [union_balls(u, dim)[0].center for u in family_links(l)]


class ChainSequence:
    """l_0 = initial_chain, l_{n+1} = refine_chain(l_n), generated on demand."""

    def __init__(self, ctx: NeighbourhoodContext, fuel, first: Optional[ChainStage] = None):
        self.ctx = ctx
        self.fuel = as_fuel(fuel)
        self._stages: list[ChainStage] = [first] if first is not None else []
        self._lock = threading.Lock()

    @property
    def generated(self) -> int:
        return len(self._stages)

    def stage(self, n: int) -> ChainStage:
        if n < 0:
            raise ValueError(f"chain stage must be a natural, got {n}")
        with self._lock:
            if not self._stages:
                self._stages.append(initial_chain(self.ctx, self.fuel))
            while len(self._stages) <= n:
                self._stages.append(refine_chain(self.ctx, self._stages[-1], self.fuel))
                log.debug("chain stage %d: %d links", len(self._stages) - 1, len(self._stages[-1].links))
            return self._stages[n]

    def l(self, n: int) -> FamilyCode:
        return self.stage(n).l

    def stage_for_precision(self, k: int) -> int:
        """Least n <= k with fmesh(l_n) < 2^-k."""
        bound = Fraction(1, 1 << k)
        for n in range(k + 1):
            if fmesh_cmp(self.l(n), bound, self.ctx.dim) is Bound.LESS:
                return n
        return k


class ComputableNeighbourhood(NamedTuple):
    a: ComputablePoint
    b: ComputablePoint
    compact: ComputableCompactSet
    sequence: ChainSequence


@dataclass
class CutResult:
    """One endpoint cut: F([0, a]) ⊆ B(x, lipschitz·t) is removed, z = F(a) is computable."""

    edge_id: str
    side: str
    case: str
    z: ComputablePoint
    far: ComputablePoint
    piece: ComputableCompactSet
    removal: UnionCode
    t: Fraction
    lipschitz: Fraction
    eps: Fraction
    u0: Fraction
    delta: Fraction
    s_new: SemicomputableSet

    @property
    def bound(self) -> Fraction:
        """Radius of the ball around x that holds the removed piece."""
        return self.lipschitz * self.t


@dataclass
class EndpointApprox:
    side: str
    point: ComputablePoint
    origin: str  # "vertex" or "cut"


@dataclass
class EdgeApproximation:
    edge_id: str
    kind: str
    case: str
    compact: ComputableCompactSet
    endpoints: dict = field(default_factory=dict)
    cuts: list = field(default_factory=list)


@dataclass
class GraphApproxReport:
    fixture: str
    eps: Fraction
    window: Fraction
    edges: list
    t_set: Optional[SemicomputableSet] = None
    fuel_spent: int = 0
    window_applies: bool = False

    @property
    def cuts(self) -> list[CutResult]:
        return [c for e in self.edges for c in e.cuts]

    @property
    def same_as_source(self) -> bool:
        return not self.cuts

    def points(self, k: int) -> list:
        """A 2^-k approximation of T (rays truncated to the window)."""
        return list(dict.fromkeys(p for e in self.edges for p in e.compact.points(k)))


# ---------------------------------------------------------------------------
# Quasi-chain inflation
# ---------------------------------------------------------------------------

def _enclosing_targets(K: Sequence[ComputableCompactSet], targets: Sequence[UnionCode], fuel: Fuel) -> list[list]:
    """For each compact, the targets that certifiably contain it.

    Target balls are indexed once; a target is tried for a compact only if
    one of its balls meets the neighbourhood of the compact's first point.
    """
    if not targets:
        return [[] for _ in K]
    dim = K[0].dim
    owner: list[int] = []
    balls: list[Ball] = []
    for t, a in enumerate(targets):
        for b in union_balls(a, dim):
            balls.append(b)
            owner.append(t)
    index = SpaceHash(balls)
    m = level_for(min(b.radius for b in balls)) + 1
    out = []
    for k in K:
        reach = Ball(k.points(m)[0], Fraction(1, 1 << m))
        near = sorted({owner[b] for b in index.touching_all(reach)})
        out.append([targets[t] for t in near if compact_inside(k, targets[t], fuel)])
    return out


def inflate_quasichain(
    K: Sequence[ComputableCompactSet],
    A: Sequence[UnionCode],
    eps,
    fuel,
) -> tuple[UnionCode, FamilyCode, UnionCode]:
    """(p, l, q) with K_0 ⊆_r J_p, K_i ⊆_r J_(l)_(i-1), K_last ⊆_r J_q for some r <= eps,
    (J_p, J_(l)_0, ..., J_q) a formal chain, and every code formally inside each
    a ∈ A that certifiably contains its compact link."""
    fuel = as_fuel(fuel)
    K = list(K)
    if len(K) < 3:
        raise ValueError(f"inflate_quasichain() needs at least three links, got {len(K)}")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    fuel.spend(1, "inflate_quasichain")
    dim = K[0].dim
    inside = _enclosing_targets(K, sorted(set(A)), fuel)
    r = eps
    failed = "a formal chain of separators"
    for attempt in range(INFLATE_MAX_HALVINGS + 1):
        try:
            codes = [separator_search(k, r, fuel) for k in K]
        except CertificationError:
            codes = None
            failed = "K_i ⊆_r J"
        if codes is not None:
            if not is_formal_chain(tuple(codes), dim):
                failed = "a formal chain of separators"
            elif not all(f_contained_unions(codes[u], a, dim) for u in range(len(K)) for a in inside[u]):
                failed = "containment in the enclosing codes"
            else:
                log.debug("inflate_quasichain: %d links at radius %s", len(K), r)
                return codes[0], family_code_of(codes[1:-1]), codes[-1]
        r /= 2
    raise search_failure(fuel, "inflate_quasichain", failed, level_for(r))


# ---------------------------------------------------------------------------
# Ω for the neighbourhood construction
# ---------------------------------------------------------------------------

def _omega_failure(
    ctx: NeighbourhoodContext, p: UnionCode, l: FamilyCode, q: UnionCode, fuel: Fuel, max_stage: int
) -> Optional[str]:
    """The first condition of Ω not certified, or None."""
    dim = ctx.dim
    try:
        fuel.spend(1, "omega")
        links = family_links(l)
        if not is_formal_chain((p, *links, q), dim):
            return "a formal chain"
        fuel.spend(1, "omega")
        if not point_in_union(ctx.a_t, p):
            return "ã ∈ J_p"
        if not point_in_union(ctx.b_t, q):
            return "b̃ ∈ J_q"
    except SearchTimeout:
        return "Ω within the fuel"
    cover = union_code_of(b for u in (p, *links, q) for b in union_balls(u, dim))
    if ctx.sprime.certify(cover, fuel, max_stage=max_stage) is not Verdict.YES:
        return "S' ⊆ J_p ∪ J_[l] ∪ J_q"
    return None


def omega_semidecide(
    ctx: NeighbourhoodContext, p: UnionCode, l: FamilyCode, q: UnionCode, fuel, max_stage: int = OMEGA_MAX_STAGE
) -> Verdict:
    """YES only if S' ⊆ J_p ∪ J_[l] ∪ J_q, the sequence is a formal chain, ã ∈ J_p and b̃ ∈ J_q."""
    failed = _omega_failure(ctx, p, l, q, as_fuel(fuel), max_stage)
    return Verdict.YES if failed is None else Verdict.TIMEOUT


# ---------------------------------------------------------------------------
# Chain stages
# ---------------------------------------------------------------------------

def subdivision_indices(h, t_a, t_b) -> tuple[int, int, int]:
    """For -4 = x_0 < ... < x_{n+1} = 4 with step h: i with t_a ∈ [x_i, x_{i+1}>,
    j with t_b ∈ <x_j, x_{j+1}] and n."""
    h, t_a, t_b = Fraction(h), Fraction(t_a), Fraction(t_b)
    if h <= 0 or (8 / h).denominator != 1:
        raise ValueError(f"subdivision step must divide 8, got {h}")
    if not -4 < t_a < t_b < 4:
        raise ValueError(f"need -4 < t_a < t_b < 4, got {t_a}, {t_b}")
    n = int(8 / h) - 1
    i = int((t_a + 4) // h)
    j = -int(-(t_b + 4) // h) - 1
    return i, j, n


def _grid(h: Fraction, n: int) -> list[Fraction]:
    return [-4 + t * h for t in range(n + 2)]


def _link_radius(ctx: NeighbourhoodContext, h: Fraction, n: int) -> Fraction:
    # strictly below half the previous stage's radius, above the half-step reach
    return ctx.speed * h * (Fraction(3, 4) + Fraction(1, 1 << (n + 3)))


def _end_balls(ctx: NeighbourhoodContext, junction: Fraction, far: Fraction, h: Fraction, k: int) -> list[Ball]:
    """Balls along g from the junction out to `far`; at distance d the radius is speed·(h + d)/2."""
    sign = 1 if far > junction else -1
    length = abs(far - junction)
    balls = []
    d = Fraction(0)
    while True:
        balls.append(Ball(ctx.g(junction + sign * d, k), ctx.speed * (h + d) / 2))
        if d >= length:
            return balls
        d = min(length, d + (h + d) / 2)


def _center_precision(ctx: NeighbourhoodContext, h: Fraction) -> int:
    return level_for(ctx.speed * h / CHAIN_CENTER_SLACK)


def grid_stage(ctx: NeighbourhoodContext, span: tuple, h: Fraction, n: int, k: int) -> ChainStage:
    """The stage-n chain on `span` with step h, centres placed at precision k (not yet certified)."""
    a, b = span
    count = (b - a) / h
    if count.denominator != 1 or count < 1:
        raise ValueError(f"step {h} does not subdivide the span [{a}, {b}]")
    intervals = tuple((a + t * h, a + (t + 1) * h) for t in range(int(count)))
    radius = _link_radius(ctx, h, n)
    links = [union_code_of([Ball(ctx.g(lo + h / 2, k), radius)]) for lo, _ in intervals]
    p = union_code_of(_end_balls(ctx, a, Fraction(-4), h, k))
    q = union_code_of(_end_balls(ctx, b, Fraction(4), h, k))
    return ChainStage(p, family_code_of(links), q, intervals, h, n, (a, b))


def _seed_failure(ctx: NeighbourhoodContext, stage: ChainStage, fuel: Fuel) -> Optional[str]:
    half = ctx.eps / 2
    links = stage.links
    if fmesh_cmp(stage.l, half, ctx.dim) is not Bound.LESS:
        return "fmesh(l) < eps/2"
    if not point_union_distance_lt(ctx.a_t, links[0], half):
        return "d(ã, J_(l)_0) < eps/2"
    if not point_union_distance_lt(ctx.b_t, links[-1], half):
        return "d(b̃, J_(l)_last) < eps/2"
    return _omega_failure(ctx, stage.p, stage.l, stage.q, fuel, CHAIN_COVER_STAGES)


def initial_chain(ctx: NeighbourhoodContext, fuel) -> ChainStage:
    """l_0 in Ω with fmesh(l_0) < eps/2, d(ã, J_(l)_0) < eps/2 and d(b̃, J_(l)_last) < eps/2."""
    fuel = as_fuel(fuel)
    fuel.spend(1, "initial_chain")
    h = min(Fraction(1, 4), Fraction(1, 1 << level_for(ctx.eps / (4 * ctx.speed_hi))))
    stage, failed, k = None, None, 0
    for attempt in range(CHAIN_MAX_ATTEMPTS):
        fuel.spend(1, "initial_chain")
        i, j, n = subdivision_indices(h, ctx.t_a, ctx.t_b)
        xs = _grid(h, n)
        k = _center_precision(ctx, h) + 4 * attempt
        stage = grid_stage(ctx, (xs[i + 1], xs[j]), h, 0, k)
        failed = _seed_failure(ctx, stage, fuel)
        if failed is None:
            log.debug("initial_chain: step %s, %d links", h, len(stage.links))
            return stage
        log.debug("initial_chain: %s not certified at step %s", failed, h)
        if fuel.remaining <= 0:
            break
        h /= 2
    raise search_failure(fuel, "initial_chain", failed, k, partial=stage)


def _refinement_failure(
    ctx: NeighbourhoodContext, old: ChainStage, mesh, new: ChainStage, fuel: Fuel
) -> Optional[str]:
    dim = ctx.dim
    if not f_contained_families(new.l, old.l, dim):
        return "J_[l'] ⊆∀ J_[l]"
    if cmp_quad(fmesh_expr(new.l, dim).scaled(2), mesh) is not Cmp.LESS:
        return "fmesh(l') < fmesh(l)/2"
    if not f_contained_unions(new.links[0], old.links[0], dim):
        return "first link inside the old first link"
    if not f_contained_unions(new.links[-1], old.links[-1], dim):
        return "last link inside the old last link"
    return _omega_failure(ctx, new.p, new.l, new.q, fuel, CHAIN_COVER_STAGES)


def refine_chain(ctx: NeighbourhoodContext, stage: ChainStage, fuel) -> ChainStage:
    """A stage l' with (l, l') satisfying G1-G5: l' ∈ Ω, J_[l'] ⊆∀ J_[l],
    fmesh(l') < fmesh(l)/2, and first and last links formally inside the old ones.

    Candidates halve the grid step on the same span; each retry places the
    centres four bits more precisely.
    """
    fuel = as_fuel(fuel)
    fuel.spend(1, "refine_chain")
    if stage.step <= 0 or not stage.span:
        raise ValueError("refine_chain() needs a stage built on a grid")
    mesh = fmesh_expr(stage.l, ctx.dim)
    h, n = stage.step / 2, stage.n + 1
    failed, k = None, 0
    for attempt in range(CHAIN_MAX_ATTEMPTS):
        fuel.spend(1, "refine_chain")
        k = _center_precision(ctx, h) + 4 * attempt
        candidate = grid_stage(ctx, stage.span, h, n, k)
        failed = _refinement_failure(ctx, stage, mesh, candidate, fuel)
        if failed is None:
            return candidate
        log.debug("refine_chain: %s not certified at centre precision %d", failed, k)
        if fuel.remaining <= 0:
            break
    raise search_failure(fuel, "refine_chain", failed, k, partial=stage)


def neighbourhood_approx(seq: ChainSequence, k: int) -> list:
    """First-ball centres of the links of l_k."""
    if k < 0 or k >= seq.generated:
        raise ValueError(f"chain stage {k} has not been generated ({seq.generated} available)")
    return list(dict.fromkeys(_link_centers(seq.stage(k).l, seq.ctx.dim)))


# ---------------------------------------------------------------------------
# Computable neighbourhoods and cuts
# ---------------------------------------------------------------------------

def computable_neighbourhood(S: SemicomputableSet, window: ChartWindow, fuel) -> ComputableNeighbourhood:
    """Computable a, b and an arc N' ⊆ g(<-4, 4>) from a to b around g(0)."""
    fuel = as_fuel(fuel)
    fuel.spend(1, "computable_neighbourhood")
    eps = window.continuity_eps()
    iso = window.isolation((Fraction(-7, 2), Fraction(7, 2)), (-4, 4))
    if iso is not None and iso <= 0:
        raise ValueError(f"chart window on edge {window.chart.edge.id!r} is not isolated from the rest of S")
    speed, speed_hi = window.speed_bounds()
    r_u = (eps if iso is None else min(iso, eps)) / 4
    K = window.piece(-3, 3, label="g[-3,3]")
    U = window.tube(Fraction(-7, 2), Fraction(7, 2), r_u)
    sprime = carve_compact(S, K, U, fuel)
    ctx = NeighbourhoodContext(
        S=S,
        sprime=sprime,
        window=window,
        eps=eps,
        a_t=window.computable_point(-2, "ã"),
        b_t=window.computable_point(2, "b̃"),
        speed=speed,
        speed_hi=speed_hi,
    )
    seq = ChainSequence(ctx, fuel)
    seq.stage(0)
    dim = window.dim

    def end_point(pick):
        def approx(k: int):
            stage = seq.stage(seq.stage_for_precision(k))
            return union_balls(pick(stage.links), dim)[0].center

        return approx

    def sampler(k: int) -> list:
        n = seq.stage_for_precision(k)
        return neighbourhood_approx(seq, n)

    a = ComputablePoint.from_rational_approx(end_point(lambda ls: ls[0]), dim, "a")
    b = ComputablePoint.from_rational_approx(end_point(lambda ls: ls[-1]), dim, "b")
    log.debug("computable neighbourhood on edge %s: eps %s, %d links at stage 0",
              window.chart.edge.id, eps, len(seq.stage(0).links))
    return ComputableNeighbourhood(a, b, ComputableCompactSet(sampler, dim, "N'"), seq)


def cut_endpoint(S: SemicomputableSet, chart: PolylineChart, eps, fuel, side: str = "start", case: str = "ii") -> CutResult:
    """z = F(a) computable with F([0, a]) ⊆ B(F(0), eps), and S_new = S \\ F([0, a>)."""
    fuel = as_fuel(fuel)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    fuel.spend(1, "cut_endpoint")
    L = chart.lipschitz
    t = dyadic_below(min(eps / L, chart.first_share / 2))
    u0, delta = t / 2, t / 16
    window = ChartWindow(chart, u0, delta)
    nb = computable_neighbourhood(S, window, fuel)
    # a = g(-2 + h_0) with h_0 <= 1/4, b = g(2 - h_0)
    inner_end = u0 - 3 * delta / 2
    iso = chart.isolation((0, inner_end), (None, u0 + delta), ISOLATION_PRECISION + level_for(window.lipschitz))
    if iso is not None and iso <= 0:
        raise ValueError(f"cut on edge {chart.edge.id!r} is not isolated from the rest of S")
    reach = eps if iso is None else min(iso, eps)
    removal = separator_search(chart.piece(0, inner_end, label="F[0,a]"), reach / 2, fuel)
    s_new = union_with_compact(subtract_union(S, removal), nb.compact)
    log.info("Cut edge %s at its %s: t=%s, removed piece within %s of the endpoint",
             chart.edge.id, side, t, L * t)
    return CutResult(
        edge_id=chart.edge.id,
        side=side,
        case=case,
        z=nb.a,
        far=nb.b,
        piece=nb.compact,
        removal=removal,
        t=t,
        lipschitz=L,
        eps=eps,
        u0=u0,
        delta=delta,
        s_new=s_new,
    )


# ---------------------------------------------------------------------------
# Whole graphs
# ---------------------------------------------------------------------------

def _case_of(kind: str, hidden_sides) -> str:
    if kind == "ray":
        return "v" if hidden_sides else "iv"
    return {0: "i", 1: "ii", 2: "iii"}[len(hidden_sides)]


def _approximate_edge(fixture: GraphFixture, S: SemicomputableSet, edge_id: str, eps: Fraction,
                      window: Fraction, fuel: Fuel) -> EdgeApproximation:
    edge = fixture.edge(edge_id)
    hidden = sorted(edge.hidden)
    case = _case_of(edge.kind, hidden)
    forward = fixture.chart(edge_id, "start")
    end_u = forward.window_end(window)
    endpoints = {}
    for side in ("start", "end") if edge.kind == "arc" else ("start",):
        v = edge.endpoint(side)
        if not isinstance(v, HiddenEndpoint):
            endpoints[side] = EndpointApprox(side, ComputablePoint.constant(v, f"{edge_id}.{side}"), "vertex")
    if not hidden:
        return EdgeApproximation(edge_id, edge.kind, case, forward.piece(0, end_u, label=f"T.{edge_id}"), endpoints)

    cuts: list[CutResult] = []
    current = S
    lo, hi = Fraction(0), end_u
    parts = []
    # both ends hidden: the end is cut first, then the start on the reduced set
    for side in sorted(hidden, key=lambda s: s != "end"):
        chart = fixture.chart(edge_id, side)
        cut = cut_endpoint(current, chart, eps, fuel, side=side, case=case)
        cuts.append(cut)
        current = cut.s_new
        parts.append(cut.piece)
        endpoints[side] = EndpointApprox(side, cut.z, "cut")
        if side == "start":
            lo = cut.u0
        else:
            hi = forward.total - cut.u0
    if lo < hi:
        parts.append(forward.piece(lo, hi, label=f"{edge_id}[{lo},{hi}]"))
    compact = join_compacts(parts, label=f"T.{edge_id}")
    return EdgeApproximation(edge_id, edge.kind, case, compact, endpoints, cuts)


def _edge_job(fixture, S, edge_id, eps, window, fuel):
    try:
        return _approximate_edge(fixture, S, edge_id, eps, window, fuel)
    except (SearchTimeout, CertificationError) as exc:
        return exc


def approximate_graph(
    fixture: GraphFixture,
    eps,
    fuel,
    window=DEFAULT_WINDOW,
    jobs: int = DEFAULT_JOBS,
) -> GraphApproxReport:
    """T ⊆ S with computable endpoints and d_H(S, T) < eps (on the window for rays).

    Every hidden endpoint is cut at eps/2 so each removed point is within
    eps/2 of its endpoint and each endpoint within eps/2 of T.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    fuel = as_fuel(fuel)
    window = Fraction(window)
    S = fixture.semicomputable()
    log.info("Approximating %s: %d edges, %d hidden endpoints, eps=%s",
             fixture.name, len(fixture.edges), len(fixture.hidden_endpoints()), eps)
    results = Parallel(n_jobs=jobs, prefer="threads")(
        delayed(_edge_job)(fixture, S, e.id, eps / 2, window, fuel) for e in fixture.edges
    )
    edges = [r for r in results if isinstance(r, EdgeApproximation)]
    report = GraphApproxReport(fixture.name, eps, window, edges, fuel_spent=fuel.spent, window_applies=fixture.has_rays)
    failed = [r for r in results if not isinstance(r, EdgeApproximation)]
    if failed:
        first = failed[0]
        if isinstance(first, CertificationError):
            log.info("Approximation of %s stopped uncertified after %d edges", fixture.name, len(edges))
            raise CertificationError(first.stage, first.predicate, first.precision, partial=report)
        log.info("Approximation of %s ran out of fuel after %d edges", fixture.name, len(edges))
        raise SearchTimeout(first.stage, fuel.spent, partial=report)
    t_set = S
    for cut in report.cuts:
        t_set = union_with_compact(subtract_union(t_set, cut.removal), cut.piece)
    report.t_set = t_set
    report.fuel_spent = fuel.spent
    log.info("Approximated %s: %d cuts, fuel spent %d", fixture.name, len(report.cuts), fuel.spent)
    return report
