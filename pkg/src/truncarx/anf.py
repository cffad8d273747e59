"""Boolean polynomials in algebraic normal form over GF(2).

A monomial is an int bitmask: bit v set means variable x_v occurs.
A polynomial is a frozenset of monomial masks (addition is symmetric
difference, so duplicate monomials cancel mod 2).  The empty set is 0
and {0} is the constant 1.

Text format (stable, used by the export files and the CLI):
  monomial: "1", or variables joined by "*" in ascending index order
            ("x0*x3")
  poly:     monomials joined by " + " in graded-lex descending order
            (higher degree first; within a degree, ascending variable
            tuples first); the zero polynomial prints as "0".
"""

from __future__ import annotations

from typing import Iterable, Mapping

__all__ = [
    "AnfPoly",
    "MonomialBudgetError",
    "DEFAULT_MONOMIAL_BUDGET",
    "monomial",
    "monomial_vars",
    "poly_mul",
    "parse_poly",
]

DEFAULT_MONOMIAL_BUDGET = 1 << 22


class MonomialBudgetError(Exception):
    """Raised when a symbolic product would exceed the monomial budget."""

    def __init__(self, message: str, monomials: int, budget: int):
        super().__init__(message)
        self.monomials = monomials
        self.budget = budget


def monomial(*variables: int) -> int:
    """Monomial mask from variable indices; monomial() is the constant 1."""
    v = 0
    for i in variables:
        if i < 0:
            raise ValueError(f"variable index must be >= 0, got {i}")
        v |= 1 << i
    return v


def monomial_vars(mask: int) -> tuple[int, ...]:
    """Ascending variable indices of a monomial mask."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _mono_key(mask: int) -> tuple[int, tuple[int, ...]]:
    # graded-lex descending == sort by this key ascending
    return (-mask.bit_count(), monomial_vars(mask))


class AnfPoly:
    """Multivariate polynomial over GF(2) in algebraic normal form."""

    __slots__ = ("_monos",)

    def __init__(self, monomials: Iterable[int] = ()):
        acc: set[int] = set()
        for m in monomials:
            if m < 0:
                raise ValueError("monomial masks must be >= 0")
            acc.symmetric_difference_update((m,))
        self._monos = frozenset(acc)

    @classmethod
    def _wrap(cls, monos: frozenset[int]) -> "AnfPoly":
        p = cls.__new__(cls)
        p._monos = monos
        return p

    @classmethod
    def zero(cls) -> "AnfPoly":
        return cls._wrap(frozenset())

    @classmethod
    def one(cls) -> "AnfPoly":
        return cls._wrap(frozenset((0,)))

    @classmethod
    def const(cls, bit: int) -> "AnfPoly":
        return cls.one() if bit & 1 else cls.zero()

    @classmethod
    def var(cls, i: int) -> "AnfPoly":
        if i < 0:
            raise ValueError(f"variable index must be >= 0, got {i}")
        return cls._wrap(frozenset((1 << i,)))

    @property
    def monomials(self) -> frozenset[int]:
        return self._monos

    def __len__(self) -> int:
        return len(self._monos)

    def __bool__(self) -> bool:
        return bool(self._monos)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AnfPoly) and self._monos == other._monos

    def __hash__(self) -> int:
        return hash(self._monos)

    def __add__(self, other: "AnfPoly") -> "AnfPoly":
        return AnfPoly._wrap(self._monos ^ other._monos)

    def __mul__(self, other: "AnfPoly") -> "AnfPoly":
        return poly_mul(self, other)

    @property
    def degree(self) -> int:
        """Max monomial degree; the zero polynomial has degree 0."""
        return max((m.bit_count() for m in self._monos), default=0)

    def variables(self) -> tuple[int, ...]:
        """Ascending indices of all variables that occur."""
        union = 0
        for m in self._monos:
            union |= m
        return monomial_vars(union)

    def shift(self, offset: int) -> "AnfPoly":
        """Relabel every variable x_i to x_{i+offset}."""
        if offset < 0:
            raise ValueError("offset must be >= 0")
        return AnfPoly._wrap(frozenset(m << offset for m in self._monos))

    def evaluate_mask(self, assignment: int) -> int:
        """Evaluate at the point whose bit v gives the value of x_v."""
        acc = 0
        for m in self._monos:
            if m & assignment == m:
                acc ^= 1
        return acc

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        """Evaluate at a point given as {variable index: 0 or 1}."""
        point = 0
        for v in self.variables():
            if v not in assignment:
                raise ValueError(f"assignment missing variable x{v}")
            if assignment[v] & 1:
                point |= 1 << v
        return self.evaluate_mask(point)

    def substitute(self, subst: Mapping[int, "AnfPoly"]) -> "AnfPoly":
        """Replace each variable with a polynomial (all must be covered)."""
        out = AnfPoly.zero()
        for m in self._monos:
            term = AnfPoly.one()
            for v in monomial_vars(m):
                if v not in subst:
                    raise ValueError(f"substitution missing variable x{v}")
                term = term * subst[v]
            out = out + term
        return out

    def to_text(self) -> str:
        if not self._monos:
            return "0"
        parts = []
        for m in sorted(self._monos, key=_mono_key):
            if m == 0:
                parts.append("1")
            else:
                parts.append("*".join(f"x{v}" for v in monomial_vars(m)))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"AnfPoly({self.to_text()!r})"


def poly_mul(p: AnfPoly, q: AnfPoly, budget: int | None = None) -> AnfPoly:
    """Product over GF(2), with an optional bound on the work/result size."""
    np_, nq = len(p), len(q)
    if budget is not None and np_ * nq > budget:
        raise MonomialBudgetError(
            f"product of {np_} x {nq} monomials exceeds budget {budget}",
            np_ * nq,
            budget,
        )
    acc: set[int] = set()
    for a in p.monomials:
        for b in q.monomials:
            acc.symmetric_difference_update((a | b,))
    if budget is not None and len(acc) > budget:
        raise MonomialBudgetError(
            f"result has {len(acc)} monomials, budget {budget}", len(acc), budget
        )
    return AnfPoly._wrap(frozenset(acc))


def parse_poly(text: str) -> AnfPoly:
    """Inverse of AnfPoly.to_text (accepts unsorted input)."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if s == "0":
        return AnfPoly.zero()
    monos = []
    for term in s.split("+"):
        term = term.strip()
        if not term:
            raise ValueError(f"empty term in {text!r}")
        if term == "1":
            monos.append(0)
            continue
        m = 0
        for factor in term.split("*"):
            factor = factor.strip()
            if not factor.startswith("x"):
                raise ValueError(f"bad factor {factor!r} in {text!r}")
            try:
                v = int(factor[1:])
            except ValueError:
                raise ValueError(f"bad factor {factor!r} in {text!r}") from None
            if v < 0:
                raise ValueError(f"bad factor {factor!r} in {text!r}")
            m |= 1 << v
        monos.append(m)
    return AnfPoly(monos)
