"""
Property suites run by `cli check`: formal-predicate soundness, chain
construction, set approximation against ground truth, and the
neighbourhood chain sequence (mesh decay, strong refinement).

Each suite returns CheckResult rows; random inputs come from a numpy
generator seeded with RANDOM_STATE, so runs are reproducible.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
import pandas as pd

from src.approx import computable_neighbourhood, inflate_quasichain
from src.budget import CertificationError, SearchTimeout, as_fuel
from src.chains import (
    chain_of_family,
    is_formal_chain,
    is_quasi_chain_on,
    refinement_witness,
    strongly_refines,
)
from src.config import CHECK_SUITES, DEFAULT_WINDOW, RANDOM_STATE
from src.fixtures import ChartWindow, GraphFixture, ground_truth_points
from src.formal import (
    f_contained_unions,
    f_disjoint_unions,
    fdiam_expr,
    fmesh_cmp,
    union_balls,
    union_code_of,
)
from src.metric import Ball, Bound, Cmp, QuadExpr, cmp_quad, dyadic_below, hausdorff_lt, sq_dist
from src.sets import approximate, restrict_to_ball

log = logging.getLogger(__name__)


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""


# ---------------------------------------------------------------------------
# Random rational data
# ---------------------------------------------------------------------------

def _random_ball(rng: np.random.Generator, dim: int) -> Ball:
    center = tuple(Fraction(int(c), 4) for c in rng.integers(-12, 13, size=dim))
    return Ball(center, Fraction(int(rng.integers(1, 9)), 8))


def _random_union(rng: np.random.Generator, dim: int) -> int:
    return union_code_of(_random_ball(rng, dim) for _ in range(int(rng.integers(1, 4))))


def _circle_point(t: Fraction) -> tuple[Fraction, Fraction]:
    """Exact rational point on the unit circle."""
    d = 1 + t * t
    return (1 - t * t) / d, 2 * t / d


def hull_samples(j: int, dim: int, rng: np.random.Generator, n: int = 8) -> list[tuple]:
    """Rational points of the closed hull of J_j: centres, boundary points and interior points."""
    out = []
    for b in union_balls(j, dim):
        out.append(b.center)
        for _ in range(n):
            t = Fraction(int(rng.integers(-16, 17)), int(rng.integers(1, 9)))
            s = Fraction(int(rng.integers(0, 9)), 8)
            ux, uy = _circle_point(t)
            offset = (ux, uy) + (Fraction(0),) * (dim - 2)
            out.append(tuple(c + b.radius * s * u for c, u in zip(b.center, offset[:dim])))
    return out


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def check_formal(fixture: GraphFixture, fuel, rng: np.random.Generator, n_samples: int = 200) -> list[CheckResult]:
    dim = max(2, fixture.dim)
    bad_disjoint = bad_contained = bad_diam = 0
    n_disjoint = n_contained = 0
    for _ in range(n_samples):
        a, b = _random_union(rng, dim), _random_union(rng, dim)
        pa = hull_samples(a, dim, rng)
        if f_disjoint_unions(a, b, dim):
            n_disjoint += 1
            if any(x.closed_contains(p) for p in pa for x in union_balls(b, dim)):
                bad_disjoint += 1
        inner = union_code_of([Ball(x.center, x.radius / 2) for x in union_balls(a, dim)])
        if f_contained_unions(inner, a, dim):
            n_contained += 1
            ps = hull_samples(inner, dim, rng)
            if not all(any(x.contains(p) for x in union_balls(a, dim)) for p in ps):
                bad_contained += 1
        bound = fdiam_expr(a, dim)
        for p, q in zip(pa, reversed(pa)):
            if cmp_quad(QuadExpr.sqrt_of(sq_dist(p, q)), bound) is Cmp.GREATER:
                bad_diam += 1
    return [
        CheckResult("formal", "disjointness soundness", bad_disjoint == 0, f"{n_disjoint} disjoint pairs sampled"),
        CheckResult("formal", "containment soundness", bad_contained == 0, f"{n_contained} contained pairs sampled"),
        CheckResult("formal", "diameter bound", bad_diam == 0, f"{bad_diam} violations"),
    ]


def _edge_pieces(fixture: GraphFixture, n: int, window):
    edge = fixture.edges[0]
    chart = fixture.chart(edge.id, "start")
    end = chart.window_end(window)
    cuts = [end * i / n for i in range(n + 1)]
    return chart, [chart.piece(cuts[i], cuts[i + 1]) for i in range(n)]


def check_chains(fixture: GraphFixture, fuel, rng: np.random.Generator, n_samples: int = 0,
                 window=DEFAULT_WINDOW) -> list[CheckResult]:
    fuel = as_fuel(fuel)
    dim = fixture.dim
    rows = []
    try:
        chart, coarse_k = _edge_pieces(fixture, 6, window)
        eps = dyadic_below(chart.window_end(window) / (24 * chart.lipschitz))
        p, l, q = inflate_quasichain(coarse_k, (), eps, fuel)
        coarse = (p, *chain_of_family(l), q)
        rows.append(CheckResult("chains", "inflated quasi-chain is a formal chain", is_formal_chain(coarse, dim)))
        samples = [k.points(4) for k in coarse_k]
        rows.append(CheckResult("chains", "formal chain separates sampled links", is_quasi_chain_on(coarse, samples, dim)))
        _, fine_k = _edge_pieces(fixture, 12, window)
        p2, l2, q2 = inflate_quasichain(fine_k, coarse, eps / 2, fuel)
        fine = (p2, *chain_of_family(l2), q2)
        witness = refinement_witness(fine, coarse, dim)
        rows.append(CheckResult("chains", "refinement witness is monotone",
                                list(witness.mapping) == sorted(witness.mapping), f"{len(witness)} fine links"))
    except (SearchTimeout, CertificationError) as exc:
        rows.append(CheckResult("chains", "chain construction", False, str(exc)))
    except ValueError as exc:
        rows.append(CheckResult("chains", "refinement witness", False, str(exc)))
    return rows


def check_sets(fixture: GraphFixture, fuel, rng: np.random.Generator, n_samples: int = 0,
               max_k: int = 3) -> list[CheckResult]:
    if fixture.has_rays:
        return [CheckResult("sets", "approximate vs ground truth", True, "skipped: unbounded fixture")]
    fuel = as_fuel(fuel)
    S = fixture.semicomputable()
    Ssc = restrict_to_ball(S, fixture.bounding_ball().index)
    Sce = fixture.ce_set()
    rows = []
    previous = None
    for k in range(max_k + 1):
        try:
            P = approximate(Sce, Ssc, k, fuel)
        except (SearchTimeout, CertificationError) as exc:
            rows.append(CheckResult("sets", f"approximate k={k}", False, str(exc)))
            break
        truth = ground_truth_points(fixture, k + 3)
        tol = Fraction(1, 1 << k) + Fraction(1, 1 << (k + 3))
        rows.append(CheckResult("sets", f"approximate k={k} within 2^-{k}", hausdorff_lt(P, truth, tol), f"{len(P)} points"))
        if previous is not None:
            step = Fraction(1, 1 << (k - 1)) + Fraction(1, 1 << k)
            rows.append(CheckResult("sets", f"approximations k={k - 1},{k} close", hausdorff_lt(previous, P, step)))
        previous = P
    return rows


def middle_window(fixture: GraphFixture) -> ChartWindow:
    """A chart window around the middle of the first segment of the first edge."""
    chart = fixture.chart(fixture.edges[0].id, "start")
    span = chart.first_share
    return ChartWindow(chart, span / 2, dyadic_below(span / 8))


def check_approx(fixture: GraphFixture, fuel, rng: np.random.Generator, n_samples: int = 0,
                 n_stages: int = 1) -> list[CheckResult]:
    fuel = as_fuel(fuel)
    dim = fixture.dim
    rows = []
    try:
        nb = computable_neighbourhood(fixture.semicomputable(), middle_window(fixture), fuel)
        seq = nb.sequence
        for n in range(n_stages + 1):
            mesh_ok = fmesh_cmp(seq.l(n), Fraction(1, 1 << n), dim) is Bound.LESS
            rows.append(CheckResult("approx", f"fmesh(l_{n}) < 2^-{n}", mesh_ok))
            if n:
                ok = strongly_refines(chain_of_family(seq.l(n)), chain_of_family(seq.l(n - 1)), dim)
                rows.append(CheckResult("approx", f"l_{n} strongly refines l_{n - 1}", ok))
    except SearchTimeout as exc:
        rows.append(CheckResult("approx", "chain sequence", False, f"timed out in {exc.stage}"))
    except CertificationError as exc:
        rows.append(CheckResult("approx", "chain sequence", False, str(exc)))
    return rows


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "formal": check_formal,
    "chains": check_chains,
    "sets": check_sets,
    "approx": check_approx,
}


def run_suite(name: str, fixture: GraphFixture, fuel, seed: int = RANDOM_STATE) -> list[CheckResult]:
    if name not in CHECK_SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(CHECK_SUITES)}")
    rng = np.random.default_rng(seed)
    fuel = as_fuel(fuel)
    names = list(SUITES) if name == "all" else [name]
    rows = []
    for suite in names:
        log.info("Running %s checks on %s", suite, fixture.name)
        rows.extend(SUITES[suite](fixture, fuel, rng))
    return rows


def results_frame(rows: list[CheckResult]) -> pd.DataFrame:
    return pd.DataFrame([r.__dict__ for r in rows], columns=["suite", "name", "passed", "detail"])
