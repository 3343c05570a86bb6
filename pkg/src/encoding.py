"""
Fixed computable enumerations and finite-sequence codes.

Every index in the toolkit is built from the functions below:

  pair / unpair   Cantor pairing on naturals; tau(i) = unpair(i)
  encode_seq      nonempty finite sequences of naturals <-> naturals
  alpha           naturals -> rational points of Q^dim (the dense sequence)
  qpos            naturals -> positive rationals

Sequence codes
--------------
Each entry n is written in bijective base 2 (digits 1 and 2; this is the
binary expansion of n + 1 without its leading 1, every bit shifted up by
one). Entries are joined by the separator digit 3 and the resulting word
over {1, 2, 3} is read as a bijective base-3 numeral. Words over {1, 2, 3}
correspond one-to-one with nonempty lists of words over {1, 2}, so the code
is a bijection and its size is linear in the size of the entries.

    encode_seq([5])    == 7      (5 -> "21", read in base 3)
    encode_seq([0, 0]) == 3      (word "3")
    decode_seq(0)      == [0]    (empty word)

Rational enumerations
---------------------
    nonneg(m)  = a / (b + 1)          with (a, b) = unpair(m)
    signed(i)  = +nonneg(i // 2) for even i, -nonneg(i // 2) for odd i
    qpos(i)    = (a + 1) / (b + 1)    with (a, b) = unpair(i)
    alpha(i, 1)   = (signed(i),)
    alpha(i, d)   = (signed(a),) + alpha(b, d - 1) with (a, b) = unpair(i)

All enumerations are surjective; none is injective (2/2 and 1/1 share a
value), which the index_of_* inverses resolve by using lowest terms.
"""

import math
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, ...]

_SEPARATOR = 3
_CHUNK = 64


# ---------------------------------------------------------------------------
# Cantor pairing
# ---------------------------------------------------------------------------

def pair(a: int, b: int) -> int:
    """Cantor pairing of two naturals."""
    if a < 0 or b < 0:
        raise ValueError(f"pair() needs naturals, got ({a}, {b})")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(z: int) -> tuple[int, int]:
    """Inverse of pair()."""
    if z < 0:
        raise ValueError(f"unpair() needs a natural, got {z}")
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def tau(i: int) -> tuple[int, int]:
    """The enumeration (tau1(i), tau2(i)) of N x N."""
    return unpair(i)


def index_of_pair(a: int, b: int) -> int:
    return pair(a, b)


# ---------------------------------------------------------------------------
# Digit conversions (divide and conquer, so long codes stay fast)
# ---------------------------------------------------------------------------

def _plain_digits(value: int, base: int, length: int) -> list[int]:
    """Exactly `length` base-`base` digits of value, most significant first."""
    if length <= _CHUNK:
        out = [0] * length
        for pos in range(length - 1, -1, -1):
            value, out[pos] = divmod(value, base)
        return out
    low = length // 2
    high, rest = divmod(value, base ** low)
    return _plain_digits(high, base, length - low) + _plain_digits(rest, base, low)


def _plain_value(digits: Sequence[int], base: int) -> int:
    if len(digits) <= _CHUNK:
        value = 0
        for d in digits:
            value = value * base + d
        return value
    low = len(digits) // 2
    return _plain_value(digits[:-low], base) * base ** low + _plain_value(digits[-low:], base)


def _shorter_words(length: int) -> int:
    """Number of words over a 3-letter alphabet shorter than `length`."""
    return (3 ** length - 1) // 2


def _word_length(n: int) -> int:
    length = max(0, (n.bit_length() * 100) // 159 - 1)
    while _shorter_words(length + 1) <= n:
        length += 1
    while length > 0 and _shorter_words(length) > n:
        length -= 1
    return length


def _bijective3_value(word: Sequence[int]) -> int:
    return _shorter_words(len(word)) + _plain_value([d - 1 for d in word], 3)


def _bijective3_word(n: int) -> list[int]:
    length = _word_length(n)
    rest = n - _shorter_words(length)
    return [d + 1 for d in _plain_digits(rest, 3, length)]


def _entry_word(n: int) -> list[int]:
    return [1 if bit == "0" else 2 for bit in bin(n + 1)[3:]]


def _entry_value(word: Sequence[int]) -> int:
    bits = "".join("0" if d == 1 else "1" for d in word)
    return int("1" + bits, 2) - 1


# ---------------------------------------------------------------------------
# Sequence codes
# ---------------------------------------------------------------------------

def encode_seq(seq: Iterable[int]) -> int:
    """Code of a nonempty finite sequence of naturals.

    Each entry is written in bijective base 2 (digits 1 and 2), entries are
    joined by the digit 3 and the word is read in bijective base 3. This
    replaces iterated Cantor pairing, whose codes grow exponentially with the
    sequence length; here the code length is linear in the total entry bits.
    encode_seq([5]) == 7 and decode_seq(0) == [0].
    """
    entries = list(seq)
    if not entries:
        raise ValueError("encode_seq() needs a nonempty sequence")
    word: list[int] = []
    for pos, n in enumerate(entries):
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"encode_seq() entry {pos} is not a natural: {n!r}")
        if pos:
            word.append(_SEPARATOR)
        word.extend(_entry_word(n))
    return _bijective3_value(word)


def decode_seq(j: int) -> list[int]:
    """The sequence ((j)_0, ..., (j)_{j-bar}) coded by j."""
    if j < 0:
        raise ValueError(f"decode_seq() needs a natural, got {j}")
    entries: list[int] = []
    group: list[int] = []
    for d in _bijective3_word(j):
        if d == _SEPARATOR:
            entries.append(_entry_value(group))
            group = []
        else:
            group.append(d)
    entries.append(_entry_value(group))
    return entries


def seq_length(j: int) -> int:
    """j-bar + 1."""
    return len(decode_seq(j))


def seq_entry(j: int, i: int) -> int:
    """(j)_i."""
    entries = decode_seq(j)
    if not 0 <= i < len(entries):
        raise ValueError(f"code {j} has {len(entries)} entries, asked for entry {i}")
    return entries[i]


def finite_set_of(j: int) -> list[int]:
    """[j] = {(j)_0, ..., (j)_{j-bar}}, sorted and duplicate-free."""
    return sorted(set(decode_seq(j)))


# ---------------------------------------------------------------------------
# Rational enumerations
# ---------------------------------------------------------------------------

def nonneg_rational(m: int) -> Fraction:
    a, b = unpair(m)
    return Fraction(a, b + 1)


def signed_rational(i: int) -> Fraction:
    q = nonneg_rational(i // 2)
    return -q if i % 2 else q


def index_of_signed(x) -> int:
    x = Fraction(x)
    mag = abs(x)
    m = pair(mag.numerator, mag.denominator - 1)
    return 2 * m + (1 if x < 0 else 0)


def qpos(i: int) -> Fraction:
    """The enumeration q of positive rationals."""
    a, b = unpair(i)
    return Fraction(a + 1, b + 1)


def index_of_qpos(q) -> int:
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"qpos only enumerates positive rationals, got {q}")
    return pair(q.numerator - 1, q.denominator - 1)


def alpha(i: int, dim: int) -> Point:
    """The dense sequence of Q^dim."""
    if dim < 1:
        raise ValueError(f"dimension must be at least 1, got {dim}")
    coords = []
    for _ in range(dim - 1):
        a, i = unpair(i)
        coords.append(signed_rational(a))
    coords.append(signed_rational(i))
    return tuple(coords)


def index_of_point(point: Sequence) -> int:
    """An index i with alpha(i, len(point)) == point."""
    if not point:
        raise ValueError("index_of_point() needs a point with at least one coordinate")
    coords = [index_of_signed(c) for c in point]
    idx = coords[-1]
    for c in reversed(coords[:-1]):
        idx = pair(c, idx)
    return idx


# ---------------------------------------------------------------------------
# Exact rational parsing / formatting ("p/q" strings)
# ---------------------------------------------------------------------------

def parse_rational(value) -> Fraction:
    """Fraction from an int, a Fraction or a "p/q" string. Floats are rejected."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"rationals must be given exactly (int or 'p/q' string), got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def as_point(values: Iterable) -> Point:
    point = tuple(parse_rational(v) for v in values)
    if not point:
        raise ValueError("a point needs at least one coordinate")
    return point


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_point(point: Sequence[Fraction]) -> list[str]:
    return [format_rational(c) for c in point]
