# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: truncated adders, pair enumeration, the
counter-based PRF, and the Threefish/compression Monte Carlo loop.

Behaviorally identical to ``fallback`` (same streams, same counts);
the test suite cross-checks the two backends.
"""

from libc.stdint cimport uint64_t

import numpy as np

name = "cython"

cdef uint64_t _SM_MUL1 = <uint64_t>0xBF58476D1CE4B9B1
cdef uint64_t _SM_MUL2 = <uint64_t>0x94D049BB133111EB
cdef uint64_t _GOLDEN = <uint64_t>0x9E3779B97F4A7C15

cdef int _ROT0[8]
cdef int _ROT1[8]
_ROT0[0] = 14; _ROT0[1] = 52; _ROT0[2] = 23; _ROT0[3] = 5
_ROT0[4] = 25; _ROT0[5] = 46; _ROT0[6] = 58; _ROT0[7] = 32
_ROT1[0] = 16; _ROT1[1] = 57; _ROT1[2] = 40; _ROT1[3] = 37
_ROT1[4] = 33; _ROT1[5] = 12; _ROT1[6] = 22; _ROT1[7] = 32


cdef inline uint64_t _width_mask(int n) noexcept nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return (<uint64_t>1 << n) - 1


cdef inline uint64_t _tadd(uint64_t x, uint64_t y, int m, int n, uint64_t msk) noexcept nogil:
    cdef uint64_t g, p, q, a, c
    cdef int k
    if m >= n - 1:
        return (x + y) & msk
    g = x & y
    p = x ^ y
    q = (p << 1) & msk
    a = (g << 1) & msk
    c = 0
    for k in range(m):
        c |= a
        a = (a << 1) & q
    return (x ^ y ^ c) & msk


cdef inline uint64_t _tadd_scan(uint64_t x, uint64_t y, int m, int n, uint64_t msk) noexcept nogil:
    cdef uint64_t c = 0
    cdef int i, k, lo
    cdef uint64_t xk, yk
    for i in range(1, n):
        lo = i - m
        if lo < 0:
            lo = 0
        for k in range(i - 1, lo - 1, -1):
            xk = (x >> k) & 1
            yk = (y >> k) & 1
            if xk & yk:
                c |= (<uint64_t>1) << i
                break
            if xk == yk:
                break
    return (x ^ y ^ c) & msk


cdef inline uint64_t _rotl(uint64_t x, int r, int n, uint64_t msk) noexcept nogil:
    r = r % n
    if r == 0:
        return x & msk
    return ((x << r) | (x >> (n - r))) & msk


cdef inline uint64_t _sm64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * _SM_MUL1
    z = (z ^ (z >> 27)) * _SM_MUL2
    return z ^ (z >> 31)


def trunc_add(x, y, int m, int n):
    return int(_tadd(<uint64_t>x, <uint64_t>y, m, n, _width_mask(n)))


def trunc_add_scan(x, y, int m, int n):
    return int(_tadd_scan(<uint64_t>x, <uint64_t>y, m, n, _width_mask(n)))


def trunc_add_batch(xs, ys, int m, int n):
    cdef uint64_t[::1] xv = np.ascontiguousarray(xs, dtype=np.uint64)
    cdef uint64_t[::1] yv = np.ascontiguousarray(ys, dtype=np.uint64)
    if xv.shape[0] != yv.shape[0]:
        raise ValueError("length mismatch")
    out = np.empty(xv.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef uint64_t msk = _width_mask(n)
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _tadd(xv[i], yv[i], m, n, msk)
    return out


def trunc_add_scan_batch(xs, ys, int m, int n):
    cdef uint64_t[::1] xv = np.ascontiguousarray(xs, dtype=np.uint64)
    cdef uint64_t[::1] yv = np.ascontiguousarray(ys, dtype=np.uint64)
    if xv.shape[0] != yv.shape[0]:
        raise ValueError("length mismatch")
    out = np.empty(xv.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef uint64_t msk = _width_mask(n)
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _tadd_scan(xv[i], yv[i], m, n, msk)
    return out


def full_add_batch(xs, ys, int n):
    cdef uint64_t[::1] xv = np.ascontiguousarray(xs, dtype=np.uint64)
    cdef uint64_t[::1] yv = np.ascontiguousarray(ys, dtype=np.uint64)
    out = np.empty(xv.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef uint64_t msk = _width_mask(n)
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = (xv[i] + yv[i]) & msk
    return out


def agreement_count(int n, int m):
    """Pairs in [0, 2^n)^2 where x +_m y == x + y."""
    cdef uint64_t msk = _width_mask(n)
    cdef uint64_t size = (<uint64_t>1) << n
    cdef uint64_t x, y, count = 0
    with nogil:
        for x in range(size):
            for y in range(size):
                if _tadd(x, y, m, n, msk) == (x + y) & msk:
                    count += 1
    return int(count)


def agreement_sample_count(int n, int m, trials, seed):
    cdef uint64_t msk = _width_mask(n)
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t ntrials = <uint64_t>trials
    cdef uint64_t i, x, y, count = 0
    with nogil:
        for i in range(ntrials):
            x = _sm64(s + (2 * i + 1) * _GOLDEN) & msk
            y = _sm64(s + (2 * i + 2) * _GOLDEN) & msk
            if _tadd(x, y, m, n, msk) == (x + y) & msk:
                count += 1
    return int(count)


def gen_words(seed, start, count, int n):
    """Elements start..start+count of the seeded PRF stream."""
    cdef uint64_t msk = _width_mask(n)
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t base = <uint64_t>start
    out = np.empty(int(count), dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(ov.shape[0]):
            ov[i] = _sm64(s + (base + i + 1) * _GOLDEN) & msk
    return out


cdef void _schedule(uint64_t* k, uint64_t* t, int nsub, int m_sched, int n,
                    uint64_t msk, uint64_t* subkeys) noexcept nogil:
    cdef int s
    for s in range(nsub):
        subkeys[4 * s + 0] = k[s % 5]
        subkeys[4 * s + 1] = _tadd(k[(s + 1) % 5], t[s % 3], m_sched, n, msk)
        subkeys[4 * s + 2] = _tadd(k[(s + 2) % 5], t[(s + 1) % 3], m_sched, n, msk)
        subkeys[4 * s + 3] = _tadd(k[(s + 3) % 5], (<uint64_t>s) & msk, m_sched, n, msk)


cdef void _encrypt(uint64_t* v, const uint64_t* subkeys, int rounds, int n,
                   uint64_t msk, int m_mix, int m_inj) noexcept nogil:
    cdef int d, i, sub = 0
    cdef uint64_t s0, x1, s2, x3
    for d in range(rounds):
        if d % 4 == 0:
            for i in range(4):
                v[i] = _tadd(v[i], subkeys[4 * sub + i], m_inj, n, msk)
            sub += 1
        s0 = _tadd(v[1], v[0], m_mix, n, msk)
        x1 = _rotl(v[1], _ROT0[d % 8], n, msk) ^ s0
        s2 = _tadd(v[3], v[2], m_mix, n, msk)
        x3 = _rotl(v[3], _ROT1[d % 8], n, msk) ^ s2
        # PERMUTE (0)(13)(2) fused with the MIX outputs
        v[0] = s0
        v[1] = x3
        v[2] = s2
        v[3] = x1
    if rounds % 4 == 0:
        for i in range(4):
            v[i] = _tadd(v[i], subkeys[4 * sub + i], m_inj, n, msk)


def _build_subkeys(key, tweak, int nsub, int m_sched, int n):
    cdef uint64_t msk = _width_mask(n)
    cdef uint64_t k[5]
    cdef uint64_t t[3]
    cdef int i
    for i in range(4):
        k[i] = <uint64_t>key[i]
    k[4] = <uint64_t>0x1BD11BDAA9FC1A22 & msk
    for i in range(4):
        k[4] ^= k[i]
    t[0] = <uint64_t>tweak[0]
    t[1] = <uint64_t>tweak[1]
    t[2] = t[0] ^ t[1]
    out = np.empty(4 * nsub, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    _schedule(k, t, nsub, m_sched, n, msk, &ov[0])
    return out


def encrypt_batch(key, tweak, blocks, params):
    """Threefish over a (B, 4) uint64 message array; returns (B, 4)."""
    cdef int n = params.width
    cdef int rounds = params.rounds
    cdef int m_mix = params.mix_m
    cdef int m_inj = params.schedule_m
    cdef int nsub = rounds // 4 + 1
    cdef uint64_t msk = _width_mask(n)
    arr = np.ascontiguousarray(blocks, dtype=np.uint64)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError("blocks must have shape (B, 4)")
    sk = _build_subkeys(key, tweak, nsub, m_inj, n)
    cdef uint64_t[::1] skv = sk
    out = arr.copy()
    cdef uint64_t[:, ::1] ov = out
    cdef Py_ssize_t b
    with nogil:
        for b in range(ov.shape[0]):
            _encrypt(&ov[b, 0], &skv[0], rounds, n, msk, m_mix, m_inj)
    return out


def skein_match_counts(chain, tweak, params_full, ms, seed, start, stop):
    """Trials [start, stop): count matches of the m-truncated
    compression against the full one, per m in ms."""
    cdef int n = params_full.width
    cdef int rounds = params_full.rounds
    cdef int nsub = rounds // 4 + 1
    cdef uint64_t msk = _width_mask(n)
    cdef uint64_t s = <uint64_t>seed
    scope_all = params_full.scope == "all"

    nm = len(ms)
    mmix = np.empty(nm + 1, dtype=np.int32)
    minj = np.empty(nm + 1, dtype=np.int32)
    all_sk = np.empty((nm + 1) * 4 * nsub, dtype=np.uint64)
    mmix[0] = n - 1
    minj[0] = n - 1
    all_sk[0:4 * nsub] = _build_subkeys(chain, tweak, nsub, n - 1, n)
    for jj, m in enumerate(ms):
        mmix[jj + 1] = m
        minj[jj + 1] = m if scope_all else n - 1
        all_sk[(jj + 1) * 4 * nsub:(jj + 2) * 4 * nsub] = _build_subkeys(
            chain, tweak, nsub, int(minj[jj + 1]), n
        )

    counts = np.zeros(nm, dtype=np.int64)
    cdef long long[::1] cv = counts
    cdef int[::1] mmixv = mmix
    cdef int[::1] minjv = minj
    cdef uint64_t[::1] skv = all_sk
    cdef uint64_t lo = <uint64_t>start
    cdef uint64_t hi = <uint64_t>stop
    cdef uint64_t i
    cdef int j, w, nmc = nm
    cdef uint64_t msg[4]
    cdef uint64_t ref[4]
    cdef uint64_t st[4]
    cdef bint same
    with nogil:
        for i in range(lo, hi):
            for w in range(4):
                msg[w] = _sm64(s + (i * 4 + w + 1) * _GOLDEN) & msk
            for w in range(4):
                ref[w] = msg[w]
            _encrypt(ref, &skv[0], rounds, n, msk, mmixv[0], minjv[0])
            for j in range(nmc):
                for w in range(4):
                    st[w] = msg[w]
                _encrypt(st, &skv[(j + 1) * 4 * nsub], rounds, n, msk,
                         mmixv[j + 1], minjv[j + 1])
                same = True
                for w in range(4):
                    if st[w] != ref[w]:
                        same = False
                        break
                if same:
                    cv[j] += 1
    return [int(c) for c in counts]
