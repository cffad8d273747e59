"""Threefish-256 with pluggable carry-truncated addition.

The cipher is parameterized over word width (64 native, toy widths
down to 4), round count, and a truncation m applied to word additions.
`scope` selects which additions are truncated: "all" (default — MIX
sums, subkey injections, and key-schedule additions alike) or "mix"
(only the MIX sums).  Full addition is m = N-1, so the untruncated
cipher is the m=None configuration.

Word-level constants (rotation schedule, parity constant, the word
permutation (0)(13)(2)) follow the Skein v1.3 specification for
Threefish-256; at toy widths rotations are reduced mod N and the
parity constant is truncated.

`add_count` figures count every trunc_add invocation — MIX sums,
injections, and the three schedule additions per subkey — so one
R-round encryption performs 2R + 7*(R//4 + 1) additions (277 for
R=72).

`skein_compress` is the Matyas-Meyer-Oseas feedforward used by Skein:
E_chain(message) xor message, with a fixed tweak; the feedforward xor
is never a truncated addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .anf import DEFAULT_MONOMIAL_BUDGET
from .circuit import (
    Circuit,
    Instruction,
    PolySystem,
    build_collision_system,
    build_preimage_system,
)
from .words import mask, rotl, trunc_add_fast

__all__ = [
    "ROTATIONS",
    "SCHEDULE_CONST",
    "PERMUTE",
    "WORDS_PER_BLOCK",
    "ThreefishParams",
    "KeySchedule",
    "n_subkeys",
    "mix",
    "key_schedule",
    "threefish_encrypt",
    "skein_compress",
    "compression_add_count",
    "build_threefish_circuit",
    "skein_ideal",
]

# Threefish-256 rotation schedule (v1.3), one (r0, r1) pair per round mod 8.
ROTATIONS = ((14, 16), (52, 57), (23, 40), (5, 37), (25, 33), (46, 12), (58, 22), (32, 32))
SCHEDULE_CONST = 0x1BD11BDAA9FC1A22
PERMUTE = (0, 3, 2, 1)  # cycle notation (0)(13)(2): words 1 and 3 swap
WORDS_PER_BLOCK = 4
MAX_ROUNDS = 72

TOY_WIDTHS = (4, 8, 16, 32, 64)


@dataclass(frozen=True)
class ThreefishParams:
    width: int = 64
    rounds: int = 72
    m: int | None = None  # None = full addition (width - 1)
    scope: str = "all"  # which additions are truncated: all | mix

    def __post_init__(self) -> None:
        if self.width not in TOY_WIDTHS:
            raise ValueError(f"width must be one of {TOY_WIDTHS}, got {self.width}")
        if not 1 <= self.rounds <= MAX_ROUNDS:
            raise ValueError(f"rounds must be in [1, {MAX_ROUNDS}], got {self.rounds}")
        if self.m is not None and not 0 <= self.m <= self.width - 1:
            raise ValueError(f"m={self.m} out of range for width {self.width}")
        if self.scope not in ("all", "mix"):
            raise ValueError(f"scope must be 'all' or 'mix', got {self.scope!r}")

    @property
    def effective_m(self) -> int:
        return self.width - 1 if self.m is None else self.m

    @property
    def mix_m(self) -> int:
        return self.effective_m

    @property
    def schedule_m(self) -> int:
        """Truncation of schedule/injection adds (full unless scope='all')."""
        return self.effective_m if self.scope == "all" else self.width - 1


@dataclass(frozen=True)
class KeySchedule:
    k: tuple[int, ...]  # k0..k3 plus parity word k4
    t: tuple[int, ...]  # t0, t1 plus t2 = t0 ^ t1
    subkeys: tuple[tuple[int, int, int, int], ...]
    add_count: int  # schedule additions performed (3 per subkey)


def n_subkeys(rounds: int) -> int:
    """Injections: before round 0 and after every 4th round."""
    return rounds // 4 + 1


def _check_words(words: Sequence[int], count: int, n: int, what: str) -> tuple[int, ...]:
    if len(words) != count:
        raise ValueError(f"{what} needs {count} words, got {len(words)}")
    for w in words:
        if not 0 <= w < (1 << n):
            raise ValueError(f"{what} word {w:#x} out of range for width {n}")
    return tuple(words)


def mix(x: int, y: int, rot: int, m: int, n: int) -> tuple[int, int]:
    """MIX: (x, y) -> (s, rotl(x, rot) ^ s) with s = x +_m y.

    The cipher passes (odd word, even word) here; since the sum
    commutes, this equals the Skein MIX which rotates its second
    input.
    """
    if not 0 <= rot < n:
        raise ValueError(f"rotation {rot} out of range for width {n}")
    s = trunc_add_fast(x, y, m, n)
    return s, rotl(x, rot, n) ^ s


def key_schedule(
    key: Sequence[int], tweak: Sequence[int], params: ThreefishParams
) -> KeySchedule:
    """Extended key/tweak words and all subkeys for params.rounds.

    Subkey s = (k_{s%5}, k_{(s+1)%5} + t_{s%3}, k_{(s+2)%5} + t_{(s+1)%3},
    k_{(s+3)%5} + s); the three additions are trunc_add at the
    configured schedule truncation.
    """
    n = params.width
    msk = mask(n)
    k = list(_check_words(key, 4, n, "key"))
    t = list(_check_words(tweak, 2, n, "tweak"))
    k.append(SCHEDULE_CONST & msk)
    for w in key:
        k[4] ^= w
    t.append(t[0] ^ t[1])
    m_sched = params.schedule_m
    subkeys = []
    adds = 0
    for s in range(n_subkeys(params.rounds)):
        sk0 = k[s % 5]
        sk1 = trunc_add_fast(k[(s + 1) % 5], t[s % 3], m_sched, n)
        sk2 = trunc_add_fast(k[(s + 2) % 5], t[(s + 1) % 3], m_sched, n)
        sk3 = trunc_add_fast(k[(s + 3) % 5], s & msk, m_sched, n)
        adds += 3
        subkeys.append((sk0, sk1, sk2, sk3))
    return KeySchedule(tuple(k), tuple(t), tuple(subkeys), adds)


def threefish_encrypt(
    key: Sequence[int],
    tweak: Sequence[int],
    block: Sequence[int],
    params: ThreefishParams,
) -> tuple[tuple[int, int, int, int], int]:
    """Encrypt one block; returns (ciphertext words, add_count).

    Subkeys inject before round 0 and after rounds 4, 8, ...; each
    round runs MIX on word pairs (0,1) and (2,3) then swaps words 1
    and 3.  add_count covers schedule, injection, and MIX additions.
    """
    n = params.width
    v = list(_check_words(block, 4, n, "block"))
    ks = key_schedule(key, tweak, params)
    adds = ks.add_count
    m_mix = params.mix_m
    m_inj = params.schedule_m
    sub = 0
    for d in range(params.rounds):
        if d % 4 == 0:
            sk = ks.subkeys[sub]
            sub += 1
            v = [trunc_add_fast(v[i], sk[i], m_inj, n) for i in range(4)]
            adds += 4
        r0, r1 = ROTATIONS[d % 8]
        v[0], v[1] = mix(v[1], v[0], r0 % n, m_mix, n)
        v[2], v[3] = mix(v[3], v[2], r1 % n, m_mix, n)
        adds += 2
        v = [v[p] for p in PERMUTE]
    if params.rounds % 4 == 0:
        sk = ks.subkeys[sub]
        v = [trunc_add_fast(v[i], sk[i], m_inj, n) for i in range(4)]
        adds += 4
    return (v[0], v[1], v[2], v[3]), adds


def skein_compress(
    chain: Sequence[int],
    tweak: Sequence[int],
    message: Sequence[int],
    params: ThreefishParams,
) -> tuple[int, int, int, int]:
    """MMO compression: Threefish(chain, tweak, message) xor message."""
    ct, _ = threefish_encrypt(chain, tweak, message, params)
    return tuple(c ^ m for c, m in zip(ct, message))


def compression_add_count(params: ThreefishParams) -> int:
    """Closed-form add_count of one encryption/compression."""
    return 2 * params.rounds + 7 * n_subkeys(params.rounds)


# -- circuit emission ---------------------------------------------------------

# Register layout, folded-subkey mode: r0-r3 state, r4 mix scratch,
# r5 constant scratch.  Schedule mode adds r6-r10 = k0..k4, r11-r13 =
# t0..t2, r14 = round-counter constant.
_FOLDED_REGS = 6
_SCHED_REGS = 15


def _emit_folded(
    n: int, rounds: int, subkeys: Sequence[tuple[int, int, int, int]],
    m_mix: int | None, m_inj: int | None,
) -> Circuit:
    ins: list[Instruction] = []
    permw = tuple(PERMUTE) + tuple(range(4, _FOLDED_REGS))
    sub = 0

    def inject() -> None:
        nonlocal sub
        for i in range(4):
            ins.append(Instruction("const", dest=5, value=subkeys[sub][i]))
            ins.append(Instruction("add", dest=i, a=i, b=5, m=m_inj))
        sub += 1

    for d in range(rounds):
        if d % 4 == 0:
            inject()
        r0, r1 = ROTATIONS[d % 8]
        ins.append(Instruction("rotl", dest=4, a=1, rot=r0 % n))
        ins.append(Instruction("add", dest=0, a=0, b=1, m=m_mix))
        ins.append(Instruction("xor", dest=1, a=4, b=0))
        ins.append(Instruction("rotl", dest=4, a=3, rot=r1 % n))
        ins.append(Instruction("add", dest=2, a=2, b=3, m=m_mix))
        ins.append(Instruction("xor", dest=3, a=4, b=2))
        ins.append(Instruction("permw", perm=permw))
    if rounds % 4 == 0:
        inject()
    return Circuit(n, _FOLDED_REGS, (0, 1, 2, 3), tuple(ins), (0, 1, 2, 3))


def _emit_with_schedule(
    n: int, rounds: int, key: Sequence[int], tweak: Sequence[int],
    m_mix: int | None, m_sched: int | None,
) -> Circuit:
    msk = mask(n)
    k = list(key) + [SCHEDULE_CONST & msk]
    for w in key:
        k[4] ^= w
    t = list(tweak) + [tweak[0] ^ tweak[1]]
    ins: list[Instruction] = []
    for i, w in enumerate(k):
        ins.append(Instruction("const", dest=6 + i, value=w))
    for i, w in enumerate(t):
        ins.append(Instruction("const", dest=11 + i, value=w))
    permw = tuple(PERMUTE) + tuple(range(4, _SCHED_REGS))
    sub = 0

    def inject() -> None:
        nonlocal sub
        s = sub
        kreg = lambda i: 6 + (s + i) % 5
        treg = lambda i: 11 + (s + i) % 3
        ins.append(Instruction("add", dest=0, a=0, b=kreg(0), m=m_sched))
        ins.append(Instruction("add", dest=5, a=kreg(1), b=treg(0), m=m_sched))
        ins.append(Instruction("add", dest=1, a=1, b=5, m=m_sched))
        ins.append(Instruction("add", dest=5, a=kreg(2), b=treg(1), m=m_sched))
        ins.append(Instruction("add", dest=2, a=2, b=5, m=m_sched))
        ins.append(Instruction("const", dest=14, value=s & msk))
        ins.append(Instruction("add", dest=5, a=kreg(3), b=14, m=m_sched))
        ins.append(Instruction("add", dest=3, a=3, b=5, m=m_sched))
        sub += 1

    for d in range(rounds):
        if d % 4 == 0:
            inject()
        r0, r1 = ROTATIONS[d % 8]
        ins.append(Instruction("rotl", dest=4, a=1, rot=r0 % n))
        ins.append(Instruction("add", dest=0, a=0, b=1, m=m_mix))
        ins.append(Instruction("xor", dest=1, a=4, b=0))
        ins.append(Instruction("rotl", dest=4, a=3, rot=r1 % n))
        ins.append(Instruction("add", dest=2, a=2, b=3, m=m_mix))
        ins.append(Instruction("xor", dest=3, a=4, b=2))
        ins.append(Instruction("permw", perm=permw))
    if rounds % 4 == 0:
        inject()
    return Circuit(n, _SCHED_REGS, (0, 1, 2, 3), tuple(ins), (0, 1, 2, 3))


def build_threefish_circuit(
    params: ThreefishParams,
    rounds: int | None = None,
    include_schedule: bool = False,
    key: Sequence[int] = (0, 0, 0, 0),
    tweak: Sequence[int] = (0, 0),
) -> Circuit:
    """Emit a circuit equal to threefish_encrypt at these parameters.

    Keys and tweaks fold into constants either way; with
    include_schedule the per-subkey schedule additions appear as ADD
    instructions (so a truncation override reaches them), otherwise
    subkey words are precomputed at the params' truncation.  ADD
    instructions carry the params' m explicitly when truncated.
    """
    n = params.width
    r = params.rounds if rounds is None else rounds
    if not 0 <= r <= MAX_ROUNDS:
        raise ValueError(f"rounds must be in [0, {MAX_ROUNDS}], got {r}")
    _check_words(key, 4, n, "key")
    _check_words(tweak, 2, n, "tweak")
    p = ThreefishParams(n, r, params.m, params.scope)

    def enc(m: int) -> int | None:
        return None if m == n - 1 else m

    m_mix = enc(p.mix_m)
    m_sched = enc(p.schedule_m)
    if include_schedule:
        return _emit_with_schedule(n, r, key, tweak, m_mix, m_sched)
    ks = key_schedule(key, tweak, p)
    return _emit_folded(n, r, ks.subkeys, m_mix, m_sched)


def skein_ideal(
    kind: str,
    params: ThreefishParams,
    rounds: int,
    subkeys: Sequence[Sequence[int]],
    target: Sequence[int] | None = None,
    budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> PolySystem:
    """Collision/preimage system for an r-round cipher core.

    `subkeys` supplies the injected constants explicitly (K_0, K_1,
    ...); rounds//4 + 1 of them are consumed.  The collision system
    relates two input copies; the preimage system fixes the output to
    `target`.
    """
    if kind not in ("collision", "preimage"):
        raise ValueError(f"kind must be 'collision' or 'preimage', got {kind!r}")
    n = params.width
    need = n_subkeys(rounds)
    if len(subkeys) != need:
        raise ValueError(f"{rounds} rounds need {need} subkeys, got {len(subkeys)}")
    sks = [tuple(_check_words(sk, 4, n, "subkey")) for sk in subkeys]
    p = ThreefishParams(n, rounds, params.m, params.scope)

    def enc(m: int) -> int | None:
        return None if m == n - 1 else m

    c = _emit_folded(n, rounds, sks, enc(p.mix_m), enc(p.schedule_m))
    if kind == "collision":
        return build_collision_system(c, budget=budget)
    if target is None:
        raise ValueError("preimage ideal needs a target")
    return build_preimage_system(c, target, budget=budget)
