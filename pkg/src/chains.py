"""
Chains of union codes: formal chain validation, mesh, strong refinement and
the interpolation utility for refinement witnesses.

A ChainCode is an ordered tuple of UnionCodes (j_0, ..., j_m). It is a formal
chain when links more than one step apart are formally disjoint.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

from src.config import DEFAULT_DIM
from src.encoding import Point
from src.formal import (
    FamilyCode,
    UnionCode,
    containing_unions,
    family_code_of,
    family_links,
    fdiam_cmp,
    f_contained_unions,
    union_balls,
    unions_inside_some,
)
from src.metric import Bound
from src.spatial import SpaceHash

log = logging.getLogger(__name__)

ChainCode = tuple[UnionCode, ...]


def chain_of_family(l: FamilyCode) -> ChainCode:
    return tuple(family_links(l))


def chain_code_of(links: Sequence[UnionCode]) -> ChainCode:
    if not links:
        raise ValueError("a chain needs at least one link")
    return tuple(links)


def family_of_chain(c: ChainCode) -> FamilyCode:
    return family_code_of(c)


def is_formal_chain(c: ChainCode, dim: int = DEFAULT_DIM) -> bool:
    """J_{j_u} and J_{j_v} formally disjoint whenever |u - v| > 1.

    All balls go into one SpaceHash tagged with their link; each ball asks
    only for the balls it touches.
    """
    links = chain_code_of(c)
    owner: list[int] = []
    balls = []
    for u, j in enumerate(links):
        for b in union_balls(j, dim):
            balls.append(b)
            owner.append(u)
    index = SpaceHash(balls)
    for pos, ball in enumerate(balls):
        for other in index.touching_all(ball):
            if abs(owner[other] - owner[pos]) > 1:
                log.debug("links %d and %d are not formally disjoint",
                          min(owner[pos], owner[other]), max(owner[pos], owner[other]))
                return False
    return True


def mesh_cmp(c: ChainCode, bound, dim: int = DEFAULT_DIM) -> Bound:
    """LESS iff every link has fdiam < bound."""
    for j in chain_code_of(c):
        if fdiam_cmp(j, bound, dim) is Bound.GEQ:
            return Bound.GEQ
    return Bound.LESS


def strongly_refines(fine: ChainCode, coarse: ChainCode, dim: int = DEFAULT_DIM) -> bool:
    """Every fine link formally inside a coarse link, first in first, last in last."""
    fine, coarse = chain_code_of(fine), chain_code_of(coarse)
    if not f_contained_unions(fine[0], coarse[0], dim):
        return False
    if not f_contained_unions(fine[-1], coarse[-1], dim):
        return False
    return unions_inside_some(fine, coarse, dim)


@dataclass(frozen=True)
class RefinementWitness:
    """mapping[r] is the index of a coarse link containing fine link r."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(self.mapping)
        if not mapping or any(not isinstance(m, int) or m < 0 for m in mapping):
            raise ValueError(f"a refinement witness maps link indices to naturals, got {mapping!r}")
        object.__setattr__(self, "mapping", mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __getitem__(self, r: int) -> int:
        return self.mapping[r]


def refinement_witness(fine: ChainCode, coarse: ChainCode, dim: int = DEFAULT_DIM) -> RefinementWitness:
    """Least coarse index formally containing each fine link."""
    mapping = containing_unions(chain_code_of(fine), chain_code_of(coarse), dim)
    for r, k in enumerate(mapping):
        if k is None:
            raise ValueError(f"fine link {r} is not formally contained in any coarse link")
    return RefinementWitness(tuple(mapping))


def find_intermediate_link(witness: RefinementWitness, p: int, q: int, i: int, k: int, j: int) -> int:
    """Least r with p < r < q and witness[r] == k.

    Given a quasi-chain refining another, fine links p and q inside coarse
    links i < k < j force some fine link between them inside link k.
    """
    n = len(witness)
    if not (0 <= p < q < n):
        raise ValueError(f"need 0 <= p < q < {n}, got p={p}, q={q}")
    if not i < k < j:
        raise ValueError(f"need i < k < j, got i={i}, k={k}, j={j}")
    if witness[p] != i or witness[q] != j:
        raise ValueError(f"witness maps {p} -> {witness[p]} and {q} -> {witness[q]}, expected {i} and {j}")
    for r in range(p + 1, q):
        if witness[r] == k:
            return r
    raise ValueError(f"no fine link between {p} and {q} maps to coarse link {k}; the chains are not quasi-chains")


def is_quasi_chain_on(c: ChainCode, samples: Sequence[Sequence[Point]], dim: int = DEFAULT_DIM) -> bool:
    """Sampled check that links more than one step apart do not meet.

    samples[u] are points of the set-level link u; none may lie in the
    closed hull of a link v with |u - v| > 1.
    """
    links = chain_code_of(c)
    if len(samples) != len(links):
        raise ValueError(f"{len(samples)} sample lists for {len(links)} links")
    for u, pts in enumerate(samples):
        for v, j in enumerate(links):
            if abs(u - v) <= 1:
                continue
            balls = union_balls(j, dim)
            if any(b.closed_contains(p) for p in pts for b in balls):
                return False
    return True
