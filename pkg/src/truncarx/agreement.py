"""Exact agreement probabilities for carry-truncated addition.

pi(m, N) is the probability, over uniform independent N-bit x and y,
that x +_m y equals x + y mod 2^N.  It satisfies a linear recurrence
with dyadic rational coefficients, so every value here is exact: the
Dyadic type keeps num / 2^exp in lowest terms and only converts to
float on demand.

The recurrence (in the probability a_m(j) that the first j digit-sum
positions avoid the pattern "2 followed by m ones"):

    a_m(j) = 1                                   for j <= m
    a_m(j) = a_m(j-1) - a_m(j-1-m) / 2^(m+2)     for j > m

and pi(m, N) = a_m(N-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .words import MAX_WIDTH, _check_m, _check_width

__all__ = [
    "Dyadic",
    "a_m",
    "pi",
    "ProbTable",
    "table1",
    "expected_match",
    "EmpiricalResult",
    "empirical_agreement",
    "EXHAUSTIVE_MAX_WIDTH",
]

# 2^(2n) pairs are enumerated in exhaustive mode; 13 keeps that under 2^26.
EXHAUSTIVE_MAX_WIDTH = 13


@dataclass(frozen=True)
class Dyadic:
    """Non-negative dyadic rational num / 2^exp, kept in lowest terms."""

    num: int
    exp: int

    def __post_init__(self) -> None:
        if self.num < 0 or self.exp < 0:
            raise ValueError("dyadic must be non-negative with exp >= 0")
        if self.num != 0 and self.exp > 0 and self.num % 2 == 0:
            raise ValueError("not in lowest terms")
        if self.num == 0 and self.exp != 0:
            raise ValueError("zero must be 0 / 2^0")

    @classmethod
    def make(cls, num: int, exp: int) -> "Dyadic":
        """Canonicalize num / 2^exp."""
        if num == 0:
            return cls(0, 0)
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        return cls(num, exp)

    @classmethod
    def one(cls) -> "Dyadic":
        return cls(1, 0)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        return Dyadic.make(
            (self.num << (e - self.exp)) + (other.num << (e - other.exp)), e
        )

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        num = (self.num << (e - self.exp)) - (other.num << (e - other.exp))
        if num < 0:
            raise ValueError("dyadic subtraction went negative")
        return Dyadic.make(num, e)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic.make(self.num * other.num, self.exp + other.exp)

    def halved(self, k: int = 1) -> "Dyadic":
        """self / 2^k."""
        if k < 0:
            raise ValueError("k must be >= 0")
        return Dyadic.make(self.num, self.exp + k)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self) -> float:
        # Fraction -> float is correctly rounded even for huge numerators.
        return float(self.as_fraction())

    def percent_str(self, digits: int = 5) -> str:
        """Value as a percentage with `digits` decimals, ties rounded up."""
        scaled = self.num * 100 * 10**digits
        q, r = divmod(scaled, 1 << self.exp)
        if 2 * r >= (1 << self.exp):
            q += 1
        whole, frac = divmod(q, 10**digits)
        return f"{whole}.{frac:0{digits}d}" if digits else str(whole)

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}"


_a_cache: dict[int, list[Dyadic]] = {}


def a_m(m: int, j: int) -> Dyadic:
    """Probability that j digit-sum positions avoid "2 then m ones"."""
    if m < 0 or j < 0:
        raise ValueError("m and j must be >= 0")
    seq = _a_cache.setdefault(m, [])
    if not seq:
        seq.extend([Dyadic.one()] * (m + 1))  # a_m(0..m) = 1
    while len(seq) <= j:
        jj = len(seq)
        seq.append(seq[jj - 1] - seq[jj - 1 - m].halved(m + 2))
    return seq[j]


def pi(m: int, n: int) -> Dyadic:
    """Exact Pr[x +_m y == x + y mod 2^n] for uniform n-bit x, y."""
    _check_width(n)
    _check_m(m, n)
    if m == n - 1:
        return Dyadic.one()
    return a_m(m, n - 1)


@dataclass(frozen=True)
class ProbTable:
    """Agreement probabilities for a range of m at word sizes 32 and 64."""

    ms: tuple[int, ...]
    col32: tuple[Dyadic, ...]
    col64: tuple[Dyadic, ...]

    def render(self, digits: int = 5) -> str:
        lines = ["m\tN=32\tN=64"]
        for m, p32, p64 in zip(self.ms, self.col32, self.col64):
            lines.append(f"{m}\t{p32.percent_str(digits)}\t{p64.percent_str(digits)}")
        return "\n".join(lines)


def table1(lo: int = 4, hi: int = 16) -> ProbTable:
    """Agreement percentages for m = lo..hi at N = 32 and N = 64."""
    if not 0 <= lo <= hi <= 31:
        raise ValueError(f"need 0 <= lo <= hi <= 31, got [{lo}, {hi}]")
    ms = tuple(range(lo, hi + 1))
    return ProbTable(
        ms,
        tuple(pi(m, 32) for m in ms),
        tuple(pi(m, 64) for m in ms),
    )


def expected_match(m: int, n: int, adds: int, rounded_pi: float | None = None) -> float:
    """pi(m, n)^adds: predicted match rate if the adds were independent.

    With rounded_pi set, that value is used as the base instead of the
    exact probability (for reproducing figures quoted from a rounded
    base, e.g. 0.97387**278).
    """
    if adds < 0:
        raise ValueError("adds must be >= 0")
    if rounded_pi is None:
        base = float(pi(m, n))
    else:
        base = float(rounded_pi)
        if not 0.0 <= base <= 1.0:
            raise ValueError("rounded_pi must lie in [0, 1]")
    return base**adds


@dataclass(frozen=True)
class EmpiricalResult:
    rate: float
    trials: int
    exact: Dyadic | None = None  # set in exhaustive mode
    ci95: float | None = None  # half-width, set in sampled mode


def empirical_agreement(
    n: int,
    m: int,
    mode: str = "exhaustive",
    trials: int = 100_000,
    seed: int = 0,
) -> EmpiricalResult:
    """Measure Pr[x +_m y == x + y] by enumeration or sampling.

    Exhaustive mode enumerates all 2^(2n) pairs and is rejected for
    n > EXHAUSTIVE_MAX_WIDTH.
    """
    _check_width(n)
    _check_m(m, n)
    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_WIDTH:
            raise ValueError(
                f"exhaustive mode needs n <= {EXHAUSTIVE_MAX_WIDTH}, got {n}"
            )
        count = _kernels.agreement_count(n, m)
        total = 1 << (2 * n)
        return EmpiricalResult(
            rate=count / total, trials=total, exact=Dyadic.make(count, 2 * n)
        )
    if mode == "sampled":
        if trials <= 0:
            raise ValueError("trials must be > 0")
        count = _kernels.agreement_sample_count(n, m, trials, seed)
        rate = count / trials
        half = 1.96 * math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)
        return EmpiricalResult(rate=rate, trials=trials, ci95=half)
    raise ValueError(f"unknown mode {mode!r}")
