"""
Tests for the fixed enumerations and sequence codes.
Run from project root: python -m pytest tests/test_encoding.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.encoding import (
    alpha,
    decode_seq,
    encode_seq,
    finite_set_of,
    format_point,
    index_of_point,
    index_of_qpos,
    index_of_signed,
    pair,
    parse_rational,
    qpos,
    seq_entry,
    seq_length,
    signed_rational,
    tau,
    unpair,
)

naturals = st.integers(min_value=0, max_value=10**6)
rationals = st.fractions(max_denominator=1000).filter(lambda q: abs(q) < 10**4)


def test_pairing_small_values():
    """Cantor pairing enumerates the diagonals in order."""
    assert [pair(a, b) for a, b in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]] == [0, 1, 2, 3, 4, 5]
    assert tau(4) == (1, 1)


@given(naturals, naturals)
def test_unpair_inverts_pair(a, b):
    assert unpair(pair(a, b)) == (a, b)


def test_sequence_code_examples():
    """Known codes: [5] -> 7, [0, 0] -> 3, and 0 decodes to [0]."""
    assert encode_seq([5]) == 7
    assert encode_seq([0, 0]) == 3
    assert decode_seq(0) == [0]
    assert decode_seq(7) == [5]


@given(st.lists(st.integers(min_value=0, max_value=5000), min_size=1, max_size=12))
@settings(max_examples=200)
def test_decode_inverts_encode(seq):
    j = encode_seq(seq)
    assert decode_seq(j) == seq
    assert seq_length(j) == len(seq)
    assert seq_entry(j, len(seq) - 1) == seq[-1]


def test_every_natural_is_a_code():
    """The code is a bijection: decoding then encoding returns the same natural."""
    for j in range(2000):
        assert encode_seq(decode_seq(j)) == j, f"code {j} does not round-trip"


def test_long_sequence_codes_stay_exact():
    seq = list(range(3000))
    assert decode_seq(encode_seq(seq)) == seq


def test_finite_set_drops_duplicates():
    assert finite_set_of(encode_seq([4, 1, 4, 0])) == [0, 1, 4]


def test_bad_sequence_entries_rejected():
    with pytest.raises(ValueError):
        encode_seq([])
    with pytest.raises(ValueError):
        encode_seq([1, -2])
    with pytest.raises(ValueError):
        seq_entry(encode_seq([1, 2]), 2)


@given(rationals)
def test_signed_enumeration_is_surjective(x):
    assert signed_rational(index_of_signed(x)) == x


@given(rationals.filter(lambda q: q > 0))
def test_qpos_enumeration_is_surjective(q):
    assert qpos(index_of_qpos(q)) == q


def test_qpos_rejects_non_positive():
    with pytest.raises(ValueError):
        index_of_qpos(0)


@given(st.lists(rationals, min_size=1, max_size=3))
@settings(max_examples=100)
def test_alpha_hits_every_rational_point(coords):
    point = tuple(coords)
    assert alpha(index_of_point(point), len(point)) == point


def test_alpha_is_not_injective():
    """nonneg(m) = a/(b+1) repeats values (2/2 == 1/1)."""
    values = [signed_rational(i) for i in range(200)]
    assert len(set(values)) < len(values)


def test_rational_parsing_is_exact():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(" -7 ") == Fraction(-7)
    assert format_point((Fraction(1, 3), Fraction(2))) == ["1/3", "2"]
    for bad in (0.5, "x/2", "1/0", True, None):
        with pytest.raises(ValueError):
            parse_rational(bad)


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
