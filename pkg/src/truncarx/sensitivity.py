"""Monte Carlo match-rate harness and the sensitivity metric.

For a hash H and its all-additions-truncated variant H_m, the
sensitivity is the least m such that H_m(M) = H(M) for at least a
threshold fraction (default 0.1%) of messages M.

Messages are drawn from a counter-based PRF (splitmix64 over
seed/counter), so trial i is a pure function of (seed, i): trials
partition freely across workers and reports are byte-identical for
any worker count.  Message length is fixed at one block.

Confidence intervals use the normal approximation; they are crude
when a count is below ~10, which is fine at the 10^6-trial scale the
metric is designed for.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .agreement import expected_match, pi
from .circuit import Circuit, eval_concrete, parse_circuit, render_circuit
from .threefish import ThreefishParams, compression_add_count
from .words import mask

__all__ = [
    "MatchRow",
    "MatchReport",
    "SkeinCompression",
    "CircuitHash",
    "prf_word",
    "match_rate",
    "sensitivity_report",
    "sensitivity",
    "compare_expected",
    "EXHAUSTIVE_MAX_BITS",
]

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
EXHAUSTIVE_MAX_BITS = 22
_CHUNK = 1 << 15


def prf_word(seed: int, index: int, n: int) -> int:
    """Element `index` of the seeded stream (pure-Python reference)."""
    z = (seed + (index + 1) * _GOLDEN) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4B9B1) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & mask(n)


@dataclass(frozen=True)
class MatchRow:
    m: int
    trials: int
    matches: int
    rate: float
    ci95: float
    expected_independent: float


@dataclass(frozen=True)
class MatchReport:
    algo: str
    seed: int
    trials: int
    threshold: float
    width: int
    add_count: int
    rows: tuple[MatchRow, ...]
    sensitivity: int | None  # None = no m in range reached threshold

    def render(self) -> str:
        sens = "above_range" if self.sensitivity is None else str(self.sensitivity)
        lines = [
            f"# algo={self.algo} seed={self.seed} adds={self.add_count} "
            f"sensitivity={sens} threshold={self.threshold!r}",
            "m\ttrials\tmatches\trate\tci95\texpected_independent",
        ]
        for r in self.rows:
            lines.append(
                f"{r.m}\t{r.trials}\t{r.matches}\t{r.rate!r}\t{r.ci95!r}"
                f"\t{r.expected_independent!r}"
            )
        return "\n".join(lines) + "\n"


class SkeinCompression:
    """Built-in skein256 harness: one-block Threefish-256 compression.

    Chain value and tweak are the Skein-256-256 IV and the UBI tweak
    of a 32-byte first-and-final message block; they are fixed
    configuration, not recomputed (full UBI chaining is out of scope).
    """

    CHAIN = (
        0xFC9DA860D048B449,
        0x2FCA66479FA7D833,
        0xB33BC3896656840F,
        0x6A54E920FDE8DA69,
    )
    TWEAK = (0x20, 0xF030000000000000)

    algo_id = "skein256"

    def __init__(self, rounds: int = 72, scope: str = "all"):
        self.params = ThreefishParams(64, rounds, None, scope)

    @property
    def width(self) -> int:
        return 64

    @property
    def block_words(self) -> int:
        return 4

    @property
    def add_count(self) -> int:
        return compression_add_count(self.params)

    def digest(self, message: Sequence[int], m: int | None = None) -> tuple[int, ...]:
        from .threefish import skein_compress

        p = self.params
        return skein_compress(
            self.CHAIN, self.TWEAK, message, ThreefishParams(64, p.rounds, m, p.scope)
        )

    def match_counts(
        self, ms: Sequence[int], seed: int, start: int, stop: int
    ) -> list[int]:
        return _kernels.skein_match_counts(
            self.CHAIN, self.TWEAK, self.params, ms, seed, start, stop
        )

    def _worker_payload(self) -> tuple:
        return ("skein", self.params.rounds, self.params.scope)


class CircuitHash:
    """Hash backed by a Circuit; H_m overrides every ADD's truncation."""

    def __init__(self, circuit: Circuit, label: str = ""):
        self.circuit = circuit
        self.algo_id = f"circuit:{label}" if label else f"circuit:{circuit.digest()[:12]}"

    @property
    def width(self) -> int:
        return self.circuit.width

    @property
    def block_words(self) -> int:
        return len(self.circuit.inputs)

    @property
    def add_count(self) -> int:
        return self.circuit.add_count()

    def digest(self, message: Sequence[int], m: int | None = None) -> tuple[int, ...]:
        return eval_concrete(self.circuit, message, m)[0]

    def match_counts(
        self, ms: Sequence[int], seed: int, start: int, stop: int
    ) -> list[int]:
        n = self.width
        w = self.block_words
        counts = [0] * len(ms)
        for i in range(start, stop):
            msg = [prf_word(seed, i * w + j, n) for j in range(w)]
            ref = eval_concrete(self.circuit, msg)[0]
            for j, m in enumerate(ms):
                if eval_concrete(self.circuit, msg, m)[0] == ref:
                    counts[j] += 1
        return counts

    def match_counts_exhaustive(self, ms: Sequence[int]) -> tuple[list[int], int]:
        """Counts over every possible message; returns (counts, total)."""
        bits = self.circuit.input_bits
        if bits > EXHAUSTIVE_MAX_BITS:
            raise ValueError(
                f"exhaustive mode needs <= {EXHAUSTIVE_MAX_BITS} input bits, got {bits}"
            )
        n = self.width
        w = self.block_words
        msk = mask(n)
        total = 1 << bits
        counts = [0] * len(ms)
        for idx in range(total):
            msg = [(idx >> (j * n)) & msk for j in range(w)]
            ref = eval_concrete(self.circuit, msg)[0]
            for j, m in enumerate(ms):
                if eval_concrete(self.circuit, msg, m)[0] == ref:
                    counts[j] += 1
        return counts, total

    def _worker_payload(self) -> tuple:
        return ("circuit", render_circuit(self.circuit))


def _run_chunk(payload: tuple, ms: tuple[int, ...], seed: int, start: int, stop: int) -> list[int]:
    if payload[0] == "skein":
        h: SkeinCompression | CircuitHash = SkeinCompression(payload[1], payload[2])
    else:
        h = CircuitHash(parse_circuit(payload[1]))
    return h.match_counts(ms, seed, start, stop)


def _match_counts(hash_, ms: Sequence[int], trials: int, seed: int, workers: int) -> list[int]:
    ms = tuple(ms)
    if workers <= 1:
        return hash_.match_counts(ms, seed, 0, trials)
    # fixed chunking: the split is independent of the worker count
    spans = [(lo, min(lo + _CHUNK, trials)) for lo in range(0, trials, _CHUNK)]
    payload = hash_._worker_payload()
    totals = [0] * len(ms)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for counts in pool.map(
            _run_chunk,
            *zip(*[(payload, ms, seed, lo, hi) for lo, hi in spans]),
        ):
            for j, c in enumerate(counts):
                totals[j] += c
    return totals


def _row(m: int, matches: int, trials: int, width: int, add_count: int) -> MatchRow:
    rate = matches / trials
    ci = 1.96 * math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)
    return MatchRow(m, trials, matches, rate, ci, expected_match(m, width, add_count))


def match_rate(hash_, m: int, trials: int, seed: int, workers: int = 1) -> MatchRow:
    """Match count/rate/CI of H_m against H over `trials` messages."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    counts = _match_counts(hash_, (m,), trials, seed, workers)
    return _row(m, counts[0], trials, hash_.width, hash_.add_count)


def sensitivity_report(
    hash_,
    threshold: float = 0.001,
    trials: int = 100_000,
    seed: int = 0,
    m_range: Sequence[int] | None = None,
    workers: int = 1,
    exhaustive: bool = False,
) -> MatchReport:
    """Per-m match table plus the derived sensitivity.

    m_range defaults to 0..min(N-1, 16).  Exhaustive mode (circuit
    hashes with few input bits) replaces sampling by full enumeration
    and ignores trials/seed/workers.
    """
    n = hash_.width
    if m_range is None:
        ms = list(range(0, min(n - 1, 16) + 1))
    else:
        ms = sorted(set(m_range))
    if not ms or ms[0] < 0 or ms[-1] > n - 1:
        raise ValueError(f"m_range must be within [0, {n - 1}]")
    if exhaustive:
        counts, total = hash_.match_counts_exhaustive(ms)
        trials = total
    else:
        counts = _match_counts(hash_, ms, trials, seed, workers)
    rows = tuple(
        _row(m, c, trials, n, hash_.add_count) for m, c in zip(ms, counts)
    )
    sens = None
    for r in rows:
        if r.rate >= threshold:
            sens = r.m
            break
    return MatchReport(
        hash_.algo_id, seed, trials, threshold, n, hash_.add_count, rows, sens
    )


def sensitivity(
    hash_,
    threshold: float = 0.001,
    trials: int = 100_000,
    seed: int = 0,
    m_range: Sequence[int] | None = None,
    workers: int = 1,
) -> int | None:
    """Least m in range with match rate >= threshold (None if none)."""
    return sensitivity_report(hash_, threshold, trials, seed, m_range, workers).sensitivity


def compare_expected(
    report: MatchReport,
    n: int | None = None,
    add_count: int | None = None,
    rounded: bool = False,
) -> str:
    """Observed vs independence-predicted rates, ratio to 3 sig figs.

    With rounded=True each base probability is rounded to 5 decimals
    before powering, matching the arithmetic behind quoted figures
    such as 0.97387**278.
    """
    n = report.width if n is None else n
    add_count = report.add_count if add_count is None else add_count
    lines = ["m\tobserved\texpected\tratio"]
    for r in report.rows:
        base = round(float(pi(r.m, n)), 5) if rounded else None
        exp = expected_match(r.m, n, add_count, rounded_pi=base)
        ratio = f"{r.rate / exp:.3g}" if exp > 0 else "inf"
        lines.append(f"{r.m}\t{r.rate!r}\t{exp!r}\t{ratio}")
    return "\n".join(lines) + "\n"
