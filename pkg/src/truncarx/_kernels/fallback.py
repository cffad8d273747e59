"""NumPy implementations of the hot kernels.

Used when the compiled extension is unavailable (or forced via
TRUNCARX_KERNEL=python).  Must stay behaviorally identical to
``_core``: same PRF stream, same counts, same ciphertexts — the test
suite compares the two backends directly when both are importable.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..threefish import PERMUTE, ROTATIONS, SCHEDULE_CONST, ThreefishParams, key_schedule
from ..words import trunc_add_fast as _scalar_fast
from ..words import trunc_add_int as _scalar_scan

name = "python"

_U64 = np.uint64
_FULL64 = _U64(0xFFFFFFFFFFFFFFFF)

# splitmix64: counter-based PRF used for all sampled-trial generation.
_GOLDEN = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4B9B1
_SM_MUL2 = 0x94D049BB133111EB


def _mask(n: int) -> np.uint64:
    return _U64((1 << n) - 1) if n < 64 else _FULL64


def trunc_add(x: int, y: int, m: int, n: int) -> int:
    return _scalar_fast(x, y, m, n)


def trunc_add_scan(x: int, y: int, m: int, n: int) -> int:
    return _scalar_scan(x, y, m, n)


def trunc_add_batch(xs: np.ndarray, ys: np.ndarray, m: int, n: int) -> np.ndarray:
    """Branch-free truncated addition, elementwise on uint64 arrays."""
    msk = _mask(n)
    x = xs.astype(_U64, copy=False)
    y = ys.astype(_U64, copy=False)
    g = x & y
    p = x ^ y
    q = (p << _U64(1)) & msk
    a = (g << _U64(1)) & msk
    c = np.zeros_like(x)
    for _ in range(m):
        c |= a
        a = (a << _U64(1)) & q
    return (x ^ y ^ c) & msk


def trunc_add_scan_batch(xs: np.ndarray, ys: np.ndarray, m: int, n: int) -> np.ndarray:
    """Definitional per-bit scan, vectorized over the pair arrays."""
    x = xs.astype(_U64, copy=False)
    y = ys.astype(_U64, copy=False)
    c = np.zeros_like(x)
    one = _U64(1)
    for i in range(1, n):
        found = np.zeros(x.shape, dtype=bool)
        alive = np.ones(x.shape, dtype=bool)
        for k in range(i - 1, max(i - m, 0) - 1, -1):
            xk = ((x >> _U64(k)) & one).astype(bool)
            yk = ((y >> _U64(k)) & one).astype(bool)
            gen = alive & xk & yk
            found |= gen
            alive &= xk ^ yk
        c |= found.astype(_U64) << _U64(i)
    return (x ^ y ^ c) & _mask(n)


def full_add_batch(xs: np.ndarray, ys: np.ndarray, n: int) -> np.ndarray:
    msk = _mask(n)
    x = xs.astype(_U64, copy=False)
    y = ys.astype(_U64, copy=False)
    with np.errstate(over="ignore"):
        return (x + y) & msk


def agreement_count(n: int, m: int) -> int:
    """Number of pairs (x, y) in [0, 2^n)^2 with x +_m y == x + y."""
    size = 1 << n
    ys = np.arange(size, dtype=_U64)
    msk = _mask(n)
    total = 0
    chunk = max(1, (1 << 22) // size)
    with np.errstate(over="ignore"):
        for lo in range(0, size, chunk):
            xs = np.arange(lo, min(lo + chunk, size), dtype=_U64)[:, None]
            full = (xs + ys) & msk
            tr = trunc_add_batch(
                np.broadcast_to(xs, (xs.shape[0], size)).ravel(),
                np.broadcast_to(ys, (xs.shape[0], size)).ravel(),
                m,
                n,
            ).reshape(xs.shape[0], size)
            total += int(np.count_nonzero(tr == full))
    return total


def _splitmix(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _U64(_SM_MUL1)
        z = (z ^ (z >> _U64(27))) * _U64(_SM_MUL2)
        return z ^ (z >> _U64(31))


def gen_words(seed: int, start: int, count: int, n: int) -> np.ndarray:
    """Elements start..start+count of the seeded PRF stream, masked to n bits.

    Element j is splitmix64(seed + (j+1) * golden) — counter-based, so
    any subrange can be generated independently by any worker.
    """
    idx = np.arange(start, start + count, dtype=_U64)
    with np.errstate(over="ignore"):
        z = _U64(seed & 0xFFFFFFFFFFFFFFFF) + (idx + _U64(1)) * _U64(_GOLDEN)
    return _splitmix(z) & _mask(n)


def agreement_sample_count(n: int, m: int, trials: int, seed: int) -> int:
    total = 0
    chunk = 1 << 18
    msk = _mask(n)
    with np.errstate(over="ignore"):
        for lo in range(0, trials, chunk):
            cnt = min(chunk, trials - lo)
            words = gen_words(seed, 2 * lo, 2 * cnt, n)
            xs, ys = words[0::2], words[1::2]
            full = (xs + ys) & msk
            total += int(np.count_nonzero(trunc_add_batch(xs, ys, m, n) == full))
    return total


def _rotl_batch(x: np.ndarray, r: int, n: int) -> np.ndarray:
    if r % n == 0:
        return x
    r %= n
    msk = _mask(n)
    return ((x << _U64(r)) | (x >> _U64(n - r))) & msk


def _add_batch(x: np.ndarray, y: np.ndarray, m: int, n: int) -> np.ndarray:
    if m == n - 1:
        return full_add_batch(x, y, n)
    return trunc_add_batch(x, y, m, n)


def encrypt_batch(
    key: Sequence[int],
    tweak: Sequence[int],
    blocks: np.ndarray,
    params: ThreefishParams,
) -> np.ndarray:
    """Threefish over a (B, 4) uint64 message array; returns (B, 4)."""
    n = params.width
    ks = key_schedule(key, tweak, params)
    m_mix = params.mix_m
    m_inj = params.schedule_m
    v = [blocks[:, i].astype(_U64) for i in range(4)]
    sub = 0
    rot = [(r0 % n, r1 % n) for r0, r1 in ROTATIONS]
    for d in range(params.rounds):
        if d % 4 == 0:
            sk = ks.subkeys[sub]
            sub += 1
            v = [_add_batch(v[i], _U64(sk[i]), m_inj, n) for i in range(4)]
        r0, r1 = rot[d % 8]
        s0 = _add_batch(v[1], v[0], m_mix, n)
        x1 = _rotl_batch(v[1], r0, n) ^ s0
        s2 = _add_batch(v[3], v[2], m_mix, n)
        x3 = _rotl_batch(v[3], r1, n) ^ s2
        v = [s0, x1, s2, x3]
        v = [v[p] for p in PERMUTE]
    if params.rounds % 4 == 0:
        sk = ks.subkeys[sub]
        v = [_add_batch(v[i], _U64(sk[i]), m_inj, n) for i in range(4)]
    return np.stack(v, axis=1)


def skein_match_counts(
    chain: Sequence[int],
    tweak: Sequence[int],
    params_full: ThreefishParams,
    ms: Sequence[int],
    seed: int,
    start: int,
    stop: int,
) -> list[int]:
    """Trials [start, stop): count messages whose m-truncated compression
    digest equals the full one, for each m in ms."""
    n = params_full.width
    counts = [0] * len(ms)
    chunk = 1 << 14
    pfull = ThreefishParams(n, params_full.rounds, None, params_full.scope)
    pms = [
        ThreefishParams(n, params_full.rounds, m, params_full.scope) for m in ms
    ]
    for lo in range(start, stop, chunk):
        cnt = min(chunk, stop - lo)
        words = gen_words(seed, lo * 4, cnt * 4, n)
        blocks = words.reshape(cnt, 4)
        # feedforward xor cancels when comparing digests of the same message
        ref = encrypt_batch(chain, tweak, blocks, pfull)
        for j, pm in enumerate(pms):
            ct = encrypt_batch(chain, tweak, blocks, pm)
            counts[j] += int(np.count_nonzero((ct == ref).all(axis=1)))
    return counts
