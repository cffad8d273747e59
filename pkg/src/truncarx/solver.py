"""Brute-force satisfiability for small ANF systems.

Assignments are enumerated in blocks: the low B = min(V, 16)
variables index bits of a packed truth table (NumPy uint64 words) and
the remaining high variables are fixed per block.  Each polynomial is
reduced modulo the high assignment to a polynomial over the low
variables, whose table is XORed together from per-variable bit
patterns; solutions are the zero bits across all polynomials.

Assignment encoding everywhere: an int whose bit v is the value of
variable x_v.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .circuit import PolySystem

__all__ = [
    "SolveBudget",
    "SolveResult",
    "BudgetExceededError",
    "solve",
    "verify",
]

_BLOCK_BITS = 16


class BudgetExceededError(Exception):
    """System too large for the enumeration budget."""


@dataclass(frozen=True)
class SolveBudget:
    max_vars: int = 28
    time_limit: float | None = None  # seconds
    max_solutions: int | None = None

    def __post_init__(self) -> None:
        if self.max_vars < 0:
            raise ValueError("max_vars must be >= 0")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.max_solutions is not None and self.max_solutions < 1:
            raise ValueError("max_solutions must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    solutions: tuple[int, ...]  # ascending; empty in count mode
    count: int
    complete: bool  # False if cut off by time limit or solution cap
    nvars: int


def verify(system: PolySystem, assignment: int) -> bool:
    """True iff every polynomial vanishes at the assignment."""
    if not 0 <= assignment < (1 << system.nvars):
        raise ValueError(
            f"assignment {assignment:#x} out of range for {system.nvars} variables"
        )
    return all(p.evaluate_mask(assignment) == 0 for p in system.polys)


def _var_tables(b: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Packed truth tables of the low variables plus the validity mask."""
    nbits = 1 << b
    nwords = max(1, nbits >> 6)
    tables = []
    low_masks = (
        0xAAAAAAAAAAAAAAAA,
        0xCCCCCCCCCCCCCCCC,
        0xF0F0F0F0F0F0F0F0,
        0xFF00FF00FF00FF00,
        0xFFFF0000FFFF0000,
        0xFFFFFFFF00000000,
    )
    for v in range(b):
        if v < 6:
            arr = np.full(nwords, low_masks[v], dtype=np.uint64)
        else:
            idx = np.arange(nwords, dtype=np.uint64)
            sel = ((idx >> np.uint64(v - 6)) & np.uint64(1)).astype(bool)
            arr = np.where(sel, np.uint64(0xFFFFFFFFFFFFFFFF), np.uint64(0))
        tables.append(arr)
    valid = np.full(nwords, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
    if nbits < 64:
        valid[0] = np.uint64((1 << nbits) - 1)
    return tables, valid


def _poly_table(
    poly_monos: frozenset[int], high: int, b: int, tables: list[np.ndarray], nwords: int
) -> np.ndarray | None:
    """Truth table of one polynomial with the high variables fixed.

    Returns None for the (reduced) zero polynomial.
    """
    lowmask = (1 << b) - 1
    lows: set[int] = set()
    for mono in poly_monos:
        mh = mono >> b
        if mh & high == mh:
            lows.symmetric_difference_update((mono & lowmask,))
    if not lows:
        return None
    acc = np.zeros(nwords, dtype=np.uint64)
    for ml in lows:
        t = np.full(nwords, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
        v = 0
        while ml:
            if ml & 1:
                t &= tables[v]
            ml >>= 1
            v += 1
        acc ^= t
    return acc


def _popcount(arr: np.ndarray) -> int:
    # one big-int popcount; avoids needing numpy >= 2.0 for bitwise_count
    return int.from_bytes(arr.tobytes(), "little").bit_count()


def _iter_set_bits(arr: np.ndarray, base: int):
    for wi in np.flatnonzero(arr):
        w = int(arr[wi])
        off = base + (int(wi) << 6)
        while w:
            lsb = w & -w
            yield off + lsb.bit_length() - 1
            w ^= lsb


def solve(
    system: PolySystem,
    budget: SolveBudget = SolveBudget(),
    mode: str = "all",
    nontrivial: bool = False,
) -> SolveResult:
    """Enumerate assignments; modes: all | first | count.

    `nontrivial` (collision systems only) excludes the diagonal
    x' = x, where the two input copies coincide.
    """
    if mode not in ("all", "first", "count"):
        raise ValueError(f"mode must be all, first, or count, got {mode!r}")
    v = system.nvars
    if v > budget.max_vars:
        raise BudgetExceededError(
            f"system has {v} variables, budget allows {budget.max_vars}"
        )
    if nontrivial and system.kind != "collision":
        raise ValueError("nontrivial filtering applies to collision systems only")
    half = v // 2
    halfmask = (1 << half) - 1

    def is_diag(a: int) -> bool:
        return (a & halfmask) == (a >> half)

    b = min(v, _BLOCK_BITS)
    nwords = max(1, (1 << b) >> 6)
    tables, valid = _var_tables(b)
    monos = [p.monomials for p in system.polys]

    # the solution cap applies when collecting; count mode always counts all
    cap = 1 if mode == "first" else (budget.max_solutions if mode == "all" else None)
    deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
    solutions: list[int] = []
    count = 0
    complete = True
    blocks_done = 0
    for high in range(1 << (v - b)):
        if deadline is not None and time.monotonic() > deadline:
            complete = False
            break
        zero = valid.copy()  # bits still satisfying every polynomial
        for pm in monos:
            t = _poly_table(pm, high, b, tables, nwords)
            if t is not None:
                zero &= ~t
            if not zero.any():
                break
        if mode == "count":
            count += _popcount(zero)
            blocks_done += 1
            continue
        stop = False
        for a in _iter_set_bits(zero, high << b):
            if nontrivial and is_diag(a):
                continue
            count += 1
            solutions.append(a)
            if cap is not None and count >= cap:
                complete = False
                stop = True
                break
        blocks_done += 1
        if stop:
            break
    if mode == "count" and nontrivial:
        # the popcounts included the diagonal; remove its satisfying part
        for x in range(1 << half):
            a = x | (x << half)
            if (a >> b) < blocks_done and verify(system, a):
                count -= 1
    return SolveResult(tuple(solutions), count, complete, v)
