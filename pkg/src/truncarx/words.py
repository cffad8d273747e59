"""Fixed-width words, carry arrays, and carry-truncated addition.

Bit 0 is the least significant bit throughout.  Addition of two N-bit
words x and y can be written x + y = x ^ y ^ c where c is the carry
word.  Truncating the carry lookback to m positions gives a family of
operations between XOR (m = 0) and genuine modular addition
(m = N - 1): carry bit i is set iff some position j in [i-m, i-1]
generates a carry ((x_j, y_j) = (1, 1)) and every position strictly
between j and i propagates it (x_k + y_k = 1).

Two implementations of the truncated adder live here: a per-bit scan
that follows the definition literally (`truncated_carry`) and a
branch-free word-parallel form (`trunc_add_fast`).  They are checked
against each other exhaustively in the tests; the scan is the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "MAX_WIDTH",
    "Word",
    "CarryArray",
    "mask",
    "rotl",
    "full_carry",
    "truncated_carry",
    "trunc_add_int",
    "trunc_add_fast",
    "pattern_agrees",
    "carry_array",
    "trunc_carry_array",
    "trunc_add",
    "agrees_by_pattern",
]

MAX_WIDTH = 64


def _check_width(n: int) -> None:
    if not 2 <= n <= MAX_WIDTH:
        raise ValueError(f"word width must be in [2, {MAX_WIDTH}], got {n}")


def _check_m(m: int, n: int) -> None:
    if not 0 <= m <= n - 1:
        raise ValueError(f"truncation must be in [0, {n - 1}], got {m}")


def mask(n: int) -> int:
    """All-ones mask for an n-bit word."""
    _check_width(n)
    return (1 << n) - 1


def rotl(x: int, r: int, n: int) -> int:
    """Rotate an n-bit word left by r (r reduced mod n)."""
    r %= n
    if r == 0:
        return x
    return ((x << r) | (x >> (n - r))) & mask(n)


@dataclass(frozen=True)
class Word:
    """An n-bit unsigned word."""

    value: int
    width: int

    def __post_init__(self) -> None:
        _check_width(self.width)
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(
                f"value {self.value:#x} out of range for width {self.width}"
            )

    def bit(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise IndexError(f"bit index {i} out of range for width {self.width}")
        return (self.value >> i) & 1

    @property
    def bits(self) -> tuple[int, ...]:
        """Bits as a tuple, index 0 = least significant."""
        return tuple((self.value >> i) & 1 for i in range(self.width))

    @classmethod
    def from_bits(cls, bits: Iterable[int], width: int | None = None) -> "Word":
        bs = tuple(bits)
        value = 0
        for i, b in enumerate(bs):
            if b not in (0, 1):
                raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
            value |= b << i
        return cls(value, len(bs) if width is None else width)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


@dataclass(frozen=True)
class CarryArray:
    """Carry bits c_0..c_{N-1} produced by an (m-truncated) addition.

    c_0 is always 0.  ``truncation`` records the lookback m used;
    m = N - 1 is a full (untruncated) carry.
    """

    bits: tuple[int, ...]
    truncation: int

    def __post_init__(self) -> None:
        n = len(self.bits)
        _check_width(n)
        _check_m(self.truncation, n)
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("carry bits must be 0 or 1")
        if self.bits[0] != 0:
            raise ValueError("carry into bit 0 must be 0")

    @property
    def width(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        v = 0
        for i, b in enumerate(self.bits):
            v |= b << i
        return v


def full_carry(x: int, y: int, n: int) -> int:
    """Carry word of the full addition x + y mod 2^n (standard recursion)."""
    c = 0
    carry = 0
    for i in range(1, n):
        s = ((x >> (i - 1)) & 1) + ((y >> (i - 1)) & 1) + carry
        carry = 1 if s >= 2 else 0
        c |= carry << i
    return c


def truncated_carry(x: int, y: int, m: int, n: int) -> int:
    """m-truncated carry word, computed by the definitional per-bit scan.

    Bit i is set iff, walking back at most m positions from i-1, a
    generating pair (1, 1) is found before the propagate chain of
    (0, 1)/(1, 0) positions is broken.
    """
    c = 0
    for i in range(1, n):
        for k in range(i - 1, max(i - m, 0) - 1, -1):
            xk = (x >> k) & 1
            yk = (y >> k) & 1
            if xk & yk:
                c |= 1 << i
                break
            if xk == yk:  # (0, 0) kills the chain
                break
    return c


def trunc_add_int(x: int, y: int, m: int, n: int) -> int:
    """m-truncated addition on plain ints (scan-based oracle path)."""
    _check_m(m, n)
    return (x ^ y ^ truncated_carry(x, y, m, n)) & mask(n)


def trunc_add_fast(x: int, y: int, m: int, n: int) -> int:
    """Branch-free m-truncated addition.

    With G = x & y (generate) and P = x ^ y (propagate), the carries
    reachable within lookback m are A_1 | ... | A_m where
    A_1 = G << 1 and A_{k+1} = (A_k << 1) & (P << 1).
    """
    _check_m(m, n)
    msk = mask(n)
    g = x & y
    p = x ^ y
    q = (p << 1) & msk
    a = (g << 1) & msk
    c = 0
    for _ in range(m):
        c |= a
        a = (a << 1) & q
    return (x ^ y ^ c) & msk


def pattern_agrees(x: int, y: int, m: int, n: int) -> bool:
    """True iff x +_m y equals the full sum x + y mod 2^n.

    Equivalent characterization on the digit-sum sequence
    s_i = x_i + y_i (i = 0..n-2): the two differ exactly when some
    s_j = 2 is followed by m consecutive 1s.
    """
    s = [((x >> i) & 1) + ((y >> i) & 1) for i in range(n - 1)]
    for j in range(n - 1):
        if s[j] == 2 and j + m <= n - 2:
            if all(s[j + k] == 1 for k in range(1, m + 1)):
                return False
    return True


# -- Word-level wrappers -----------------------------------------------------


def _check_same_width(x: Word, y: Word) -> int:
    if x.width != y.width:
        raise ValueError(f"width mismatch: {x.width} vs {y.width}")
    return x.width


def carry_array(x: Word, y: Word) -> CarryArray:
    """Full carry array of x + y."""
    n = _check_same_width(x, y)
    c = full_carry(x.value, y.value, n)
    return CarryArray(tuple((c >> i) & 1 for i in range(n)), n - 1)


def trunc_carry_array(x: Word, y: Word, m: int) -> CarryArray:
    """m-truncated carry array of x +_m y."""
    n = _check_same_width(x, y)
    _check_m(m, n)
    c = truncated_carry(x.value, y.value, m, n)
    return CarryArray(tuple((c >> i) & 1 for i in range(n)), m)


def trunc_add(x: Word, y: Word, m: int) -> Word:
    """x +_m y as a Word (scan path; see trunc_add_fast for the fast path)."""
    n = _check_same_width(x, y)
    _check_m(m, n)
    return Word(trunc_add_int(x.value, y.value, m, n), n)


def agrees_by_pattern(x: Word, y: Word, m: int) -> bool:
    """Pattern-avoidance test for x +_m y == x + y (no addition performed)."""
    n = _check_same_width(x, y)
    _check_m(m, n)
    return pattern_agrees(x.value, y.value, m, n)
