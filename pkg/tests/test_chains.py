"""
Tests for chain codes: formal chains, mesh, strong refinement and the
refinement-witness interpolation.
Run from project root: python -m pytest tests/test_chains.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.chains import (
    RefinementWitness,
    chain_code_of,
    chain_of_family,
    family_of_chain,
    find_intermediate_link,
    is_formal_chain,
    is_quasi_chain_on,
    mesh_cmp,
    refinement_witness,
    strongly_refines,
)
from src.formal import union_code_of
from src.metric import Ball, Bound


def beads(xs, radius):
    """One single-ball link per x, centred on the x-axis."""
    return tuple(union_code_of([Ball((Fraction(x), 0), Fraction(radius))]) for x in xs)


COARSE = beads([0, Fraction(3, 2), 3], 1)
FINE = beads([0, Fraction(1, 2), 1, Fraction(3, 2), 2, Fraction(5, 2), 3], Fraction(1, 4))


def test_formal_chain_examples():
    assert is_formal_chain(beads([0, Fraction(3, 2), 10], 1))
    assert not is_formal_chain(beads([0, Fraction(3, 2), Fraction(19, 10)], 1))
    assert is_formal_chain(beads([0], 1)), "a single link is a chain"


def test_formal_chain_ignores_neighbouring_overlap():
    """Adjacent links may overlap; only links two apart must separate."""
    assert is_formal_chain(beads([0, 1, Fraction(5, 2), 4], 1))
    assert not is_formal_chain(beads([0, 1, Fraction(3, 2)], 1))


def test_formal_chain_with_mixed_radii():
    far = union_code_of([Ball((0, 0), 4), Ball((0, 6), Fraction(1, 8))])
    links = (far, *beads([5, 6, 7], Fraction(3, 4)))
    assert is_formal_chain(links)
    looped = links + (union_code_of([Ball((1, 0), Fraction(1, 16))]),)
    assert not is_formal_chain(looped), "a small ball inside the first link"


def test_long_bead_chains():
    xs = [Fraction(i, 4) for i in range(2000)]
    assert is_formal_chain(beads(xs, Fraction(3, 16)))
    assert not is_formal_chain(beads(xs, Fraction(1, 4)))


def test_family_round_trip():
    assert chain_of_family(family_of_chain(COARSE)) == COARSE
    with pytest.raises(ValueError):
        chain_code_of([])


def test_mesh():
    assert mesh_cmp(COARSE, 3) is Bound.LESS
    assert mesh_cmp(COARSE, 2) is Bound.GEQ
    assert mesh_cmp(FINE, 1) is Bound.LESS


def test_strong_refinement():
    assert strongly_refines(FINE, COARSE)
    assert not strongly_refines(tuple(reversed(FINE)), COARSE), "ends must land in the end links"
    assert not strongly_refines(COARSE, FINE)


def test_refinement_witness_takes_least_index():
    witness = refinement_witness(FINE, COARSE)
    assert witness.mapping == (0, 0, 1, 1, 1, 2, 2)
    assert len(witness) == 7
    with pytest.raises(ValueError):
        refinement_witness(COARSE, FINE)


def test_find_intermediate_link():
    witness = refinement_witness(FINE, COARSE)
    assert find_intermediate_link(witness, 1, 5, 0, 1, 2) == 2
    with pytest.raises(ValueError):
        find_intermediate_link(witness, 1, 5, 0, 2, 1)
    with pytest.raises(ValueError):
        find_intermediate_link(RefinementWitness((0, 2)), 0, 1, 0, 1, 2)


def test_witness_rejects_bad_mappings():
    with pytest.raises(ValueError):
        RefinementWitness(())
    with pytest.raises(ValueError):
        RefinementWitness((0, -1))


def test_quasi_chain_on_samples():
    samples = [[(Fraction(0), Fraction(0))], [(Fraction(3, 2), Fraction(0))], [(Fraction(3), Fraction(0))]]
    assert is_quasi_chain_on(COARSE, samples)
    stray = [[(Fraction(0), Fraction(0)), (Fraction(5, 2), Fraction(0))], samples[1], samples[2]]
    assert not is_quasi_chain_on(COARSE, stray)
    with pytest.raises(ValueError):
        is_quasi_chain_on(COARSE, samples[:2])


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
