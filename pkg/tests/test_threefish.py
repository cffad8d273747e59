"""Threefish-256 with pluggable truncated addition: reference vectors,
key schedule, add-count accounting, toy-width properties, circuit export,
and the MMO-style compression wrapper."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import load_kat_vectors
from truncarx import _kernels
from truncarx.circuit import eval_concrete, parse_circuit, render_circuit
from truncarx.threefish import (
    PERMUTE,
    ROTATIONS,
    SCHEDULE_CONST,
    ThreefishParams,
    build_threefish_circuit,
    compression_add_count,
    key_schedule,
    mix,
    n_subkeys,
    skein_compress,
    skein_ideal,
    threefish_encrypt,
)
from truncarx.words import mask, rotl, trunc_add_int


class TestParams:
    def test_defaults(self):
        p = ThreefishParams()
        assert (p.width, p.rounds, p.m, p.scope) == (64, 72, None, "all")
        assert p.effective_m == 63
        assert p.mix_m == 63 and p.schedule_m == 63

    def test_scope_mix(self):
        p = ThreefishParams(m=2, scope="mix")
        assert p.mix_m == 2
        assert p.schedule_m == 63  # schedule adds stay full

    def test_validation(self):
        with pytest.raises(ValueError):
            ThreefishParams(width=5)
        with pytest.raises(ValueError):
            ThreefishParams(rounds=0)
        with pytest.raises(ValueError):
            ThreefishParams(m=64)
        with pytest.raises(ValueError):
            ThreefishParams(scope="both")


class TestMix:
    def test_contract(self):
        # mix returns (s, rotl(x, rot) ^ s) with s = x +_m y
        x, y, r, m, n = 9, 11, 1, 3, 4
        s = trunc_add_int(x, y, m, n)
        assert mix(x, y, r, m, n) == (s, rotl(x, r, n) ^ s)

    def test_commutes_through_sum(self):
        # the sum side is symmetric, so swapping arguments only moves the rotate
        for x in range(16):
            for y in range(16):
                s1, _ = mix(x, y, 1, 2, 4)
                s2, _ = mix(y, x, 1, 2, 4)
                assert s1 == s2


class TestSchedule:
    def test_structure(self):
        ks = key_schedule((1, 2, 3, 4), (5, 6), ThreefishParams())
        assert len(ks.subkeys) == n_subkeys(72) == 19
        assert ks.k[4] == SCHEDULE_CONST ^ 1 ^ 2 ^ 3 ^ 4
        assert ks.t[2] == 5 ^ 6
        assert ks.add_count == 3 * 19

    def test_first_subkey_words(self):
        key, tweak = (10, 20, 30, 40), (7, 9)
        ks = key_schedule(key, tweak, ThreefishParams())
        # subkey 0: (k0, k1 + t0, k2 + t1, k3 + 0)
        assert ks.subkeys[0] == (10, 20 + 7, 30 + 9, 40)

    def test_counter_truncated_add(self):
        # with m=0 every schedule + becomes xor
        p = ThreefishParams(m=0)
        ks = key_schedule((10, 20, 30, 40), (7, 9), p)
        assert ks.subkeys[0] == (10, 20 ^ 7, 30 ^ 9, 40 ^ 0)
        assert ks.subkeys[1][3] == ((10 ^ 20 ^ 30 ^ 40 ^ SCHEDULE_CONST) ^ 1)

    def test_toy_width_reduction(self):
        p = ThreefishParams(width=4, rounds=8)
        ks = key_schedule((1, 2, 3, 4), (5, 6), p)
        assert all(0 <= w < 16 for sk in ks.subkeys for w in sk)
        assert ks.k[4] == (SCHEDULE_CONST & 0xF) ^ 1 ^ 2 ^ 3 ^ 4

    def test_word_range_checked(self):
        with pytest.raises(ValueError):
            key_schedule((1 << 64, 0, 0, 0), (0, 0), ThreefishParams())
        with pytest.raises(ValueError):
            key_schedule((0, 0, 0), (0, 0), ThreefishParams())


class TestEncrypt:
    def test_reference_vectors(self):
        p = ThreefishParams()
        for key, tweak, pt, ct in load_kat_vectors():
            got, adds = threefish_encrypt(key, tweak, pt, p)
            assert got == ct
            assert adds == 277

    def test_add_count_input_independent(self):
        p = ThreefishParams()
        rng = np.random.default_rng(0)
        for _ in range(5):
            key = tuple(int(v) for v in rng.integers(0, 1 << 63, 4, dtype=np.uint64))
            tweak = tuple(int(v) for v in rng.integers(0, 1 << 63, 2, dtype=np.uint64))
            pt = tuple(int(v) for v in rng.integers(0, 1 << 63, 4, dtype=np.uint64))
            assert threefish_encrypt(key, tweak, pt, p)[1] == 277

    @pytest.mark.parametrize("rounds", [1, 2, 3, 4, 5, 8, 71, 72])
    def test_add_count_closed_form(self, rounds):
        p = ThreefishParams(rounds=rounds)
        want = 2 * rounds + 7 * n_subkeys(rounds)
        assert compression_add_count(p) == want
        assert threefish_encrypt((0,) * 4, (0, 0), (0,) * 4, p)[1] == want

    def test_m0_differs_from_full(self):
        key, tweak, pt = (1, 2, 3, 4), (5, 6), (7, 8, 9, 10)
        full, _ = threefish_encrypt(key, tweak, pt, ThreefishParams())
        xored, _ = threefish_encrypt(key, tweak, pt, ThreefishParams(m=0))
        assert full != xored

    def test_high_m_converges_to_full(self):
        key, tweak, pt = (1, 2, 3, 4), (5, 6), (7, 8, 9, 10)
        full, _ = threefish_encrypt(key, tweak, pt, ThreefishParams())
        near, _ = threefish_encrypt(key, tweak, pt, ThreefishParams(m=63))
        assert near == full

    @pytest.mark.parametrize("rounds", range(1, 9))
    def test_toy_injective_exhaustive(self, rounds):
        # width 4, full addition: encryption must be a permutation of 16^4 blocks
        p = ThreefishParams(width=4, rounds=rounds)
        key, tweak = (3, 14, 15, 9), (2, 6)
        blocks = np.arange(1 << 16, dtype=np.uint64)
        arr = np.stack(
            [(blocks >> np.uint64(4 * w)) & np.uint64(0xF) for w in range(4)], axis=1
        )
        cts = _kernels.encrypt_batch(key, tweak, arr, p)
        packed = (
            cts[:, 0]
            | (cts[:, 1] << np.uint64(4))
            | (cts[:, 2] << np.uint64(8))
            | (cts[:, 3] << np.uint64(12))
        )
        assert len(np.unique(packed)) == 1 << 16

    def test_toy_width8_injective_sampled(self):
        # 2^32 blocks is out of test scope; distinct sample -> distinct ciphertexts
        p = ThreefishParams(width=8, rounds=8)
        key, tweak = (3, 14, 15, 9), (2, 6)
        rng = np.random.default_rng(42)
        packed = rng.choice(1 << 32, size=1 << 20, replace=False).astype(np.uint64)
        arr = np.stack(
            [(packed >> np.uint64(8 * w)) & np.uint64(0xFF) for w in range(4)], axis=1
        )
        cts = _kernels.encrypt_batch(key, tweak, arr, p)
        out = (
            cts[:, 0]
            | (cts[:, 1] << np.uint64(8))
            | (cts[:, 2] << np.uint64(16))
            | (cts[:, 3] << np.uint64(24))
        )
        assert len(np.unique(out)) == len(packed)

    def test_truncated_cipher_still_a_permutation(self):
        # truncated addition stays invertible in each argument (carries only
        # consult lower bits), so H_m is a permutation for every m
        key, tweak = (3, 14, 15, 9), (2, 6)
        blocks = np.arange(1 << 16, dtype=np.uint64)
        arr = np.stack(
            [(blocks >> np.uint64(4 * w)) & np.uint64(0xF) for w in range(4)], axis=1
        )
        for m in range(4):
            p = ThreefishParams(width=4, rounds=8, m=m)
            cts = _kernels.encrypt_batch(key, tweak, arr, p)
            packed = (
                cts[:, 0]
                | (cts[:, 1] << np.uint64(4))
                | (cts[:, 2] << np.uint64(8))
                | (cts[:, 3] << np.uint64(12))
            )
            assert len(np.unique(packed)) == 1 << 16


class TestCompress:
    def test_feedforward(self):
        chain, tweak, msg = (1, 2, 3, 4), (5, 6), (7, 8, 9, 10)
        p = ThreefishParams()
        ct, adds = threefish_encrypt(chain, tweak, msg, p)
        digest = skein_compress(chain, tweak, msg, p)
        assert digest == tuple(c ^ m for c, m in zip(ct, msg))
        assert adds == compression_add_count(p)

    def test_compression_not_injective_at_toy_width(self):
        # the feedforward xor turns the permutation into a random-looking map
        chain, tweak = (3, 14, 15, 9), (2, 6)
        p = ThreefishParams(width=4, rounds=8)
        seen = set()
        for block in range(1 << 16):
            msg = tuple((block >> (4 * w)) & 0xF for w in range(4))
            seen.add(skein_compress(chain, tweak, msg, p))
        assert len(seen) < 1 << 16

    def test_stable_across_runs(self):
        chain, tweak, msg = (1, 2, 3, 4), (5, 6), (7, 8, 9, 10)
        p = ThreefishParams(m=9)
        assert skein_compress(chain, tweak, msg, p) == skein_compress(
            chain, tweak, msg, p
        )

    def test_compression_matches_circuit_toy(self):
        # N=4, R=4: digest equals circuit evaluation xor message, all messages
        chain, tweak = (3, 14, 15, 9), (2, 6)
        p = ThreefishParams(width=4, rounds=4)
        c = build_threefish_circuit(p, key=chain, tweak=tweak)
        for block in range(1 << 16):
            msg = tuple((block >> (4 * w)) & 0xF for w in range(4))
            want = skein_compress(chain, tweak, msg, p)
            ct, _ = eval_concrete(c, msg)
            assert tuple(a ^ b for a, b in zip(ct, msg)) == want


class TestCircuitEmission:
    @pytest.mark.parametrize("rounds", [1, 2, 3])
    def test_folded_matches_native_dense_sweep(self, rounds):
        key, tweak = (3, 14, 15, 9), (2, 6)
        for m in range(4):
            p = ThreefishParams(width=4, rounds=rounds, m=m)
            c = build_threefish_circuit(p, key=key, tweak=tweak)
            for block in range(0, 1 << 16, 7):  # stride for speed, ~9400 blocks
                words = [(block >> (4 * w)) & 0xF for w in range(4)]
                want, _ = threefish_encrypt(key, tweak, tuple(words), p)
                got, adds = eval_concrete(c, words)
                assert got == want
                assert adds == 2 * rounds + 4 * n_subkeys(rounds)

    @pytest.mark.parametrize("rounds", [5, 8])
    def test_folded_matches_native_randomized(self, rounds):
        key, tweak = (1, 2, 3, 4), (5, 6)
        rng = np.random.default_rng(7)
        for m in range(4):
            p = ThreefishParams(width=4, rounds=rounds, m=m)
            c = build_threefish_circuit(p, key=key, tweak=tweak)
            for block in rng.integers(0, 1 << 16, size=300):
                words = [(int(block) >> (4 * w)) & 0xF for w in range(4)]
                want, _ = threefish_encrypt(key, tweak, tuple(words), p)
                assert eval_concrete(c, words)[0] == want

    def test_width8_randomized(self):
        key, tweak = (10, 20, 30, 40), (50, 60)
        rng = np.random.default_rng(3)
        for m in (0, 3, 7):
            p = ThreefishParams(width=8, rounds=4, m=m)
            c = build_threefish_circuit(p, key=key, tweak=tweak)
            for _ in range(100):
                words = [int(v) for v in rng.integers(0, 256, size=4)]
                want, _ = threefish_encrypt(key, tweak, tuple(words), p)
                assert eval_concrete(c, words)[0] == want

    def test_include_schedule_override_tracks_native(self):
        # with schedule instructions present, an override reaches every add
        key, tweak = (3, 14, 15, 9), (2, 6)
        c = build_threefish_circuit(
            ThreefishParams(width=4, rounds=2), key=key, tweak=tweak, include_schedule=True
        )
        for m in range(4):
            p = ThreefishParams(width=4, rounds=2, m=m)
            for block in (0x1234, 0xBEEF, 0x0001, 0xFFFF):
                words = [(block >> (4 * w)) & 0xF for w in range(4)]
                want, _ = threefish_encrypt(key, tweak, tuple(words), p)
                got, adds = eval_concrete(c, words, trunc_override=m)
                assert got == want
                assert adds == compression_add_count(p)

    def test_folded_circuit_fixes_schedule_truncation(self):
        # folded subkeys are computed at the params' m; overriding the circuit
        # afterwards does NOT re-truncate the schedule (documented behavior)
        key, tweak = (3, 14, 15, 9), (2, 6)
        p0 = ThreefishParams(width=4, rounds=2, m=0)
        c = build_threefish_circuit(p0, key=key, tweak=tweak)
        p_mix0 = ThreefishParams(width=4, rounds=2, m=0, scope="mix")
        block = 0x5A3C
        words = [(block >> (4 * w)) & 0xF for w in range(4)]
        native_all, _ = threefish_encrypt(key, tweak, tuple(words), p0)
        native_mix, _ = threefish_encrypt(key, tweak, tuple(words), p_mix0)
        folded, _ = eval_concrete(c, words)
        assert folded == native_all
        assert native_mix != native_all  # schedule truncation matters here

    def test_rounds_argument_truncates_emission(self):
        p = ThreefishParams(width=4, rounds=8, m=2)
        c = build_threefish_circuit(p, rounds=2)
        c2 = build_threefish_circuit(ThreefishParams(width=4, rounds=2, m=2))
        assert render_circuit(c) == render_circuit(c2)

    def test_render_parse_round_trip(self):
        c = build_threefish_circuit(ThreefishParams(width=8, rounds=5, m=3))
        assert parse_circuit(render_circuit(c)) == c


class TestIdeal:
    def test_collision_system_shape(self):
        p = ThreefishParams(width=4, rounds=5, m=2)
        subkeys = [(0, 0, 0, 0), (1, 2, 3, 4)]
        sys = skein_ideal("collision", p, 5, subkeys)
        assert sys.kind == "collision"
        assert sys.nvars == 32  # two copies of a 16-bit input
        assert len(sys.polys) == 16

    def test_preimage_solution_verifies(self):
        p = ThreefishParams(width=4, rounds=2, m=2)
        key, tweak = (3, 14, 15, 9), (2, 6)
        ks = key_schedule(key, tweak, p)
        msg = (0xA, 0x3, 0x0, 0xF)
        target, _ = threefish_encrypt(key, tweak, msg, p)
        sys = skein_ideal("preimage", p, 2, ks.subkeys, target=target)
        assign = sum(w << (4 * i) for i, w in enumerate(msg))
        assert all(poly.evaluate_mask(assign) == 0 for poly in sys.polys)

    def test_subkey_count_checked(self):
        p = ThreefishParams(width=4, rounds=5, m=2)
        with pytest.raises(ValueError):
            skein_ideal("collision", p, 5, [(0, 0, 0, 0)])  # needs 2 subkeys

    def test_kind_checked(self):
        p = ThreefishParams(width=4, rounds=1, m=1)
        with pytest.raises(ValueError):
            skein_ideal("frobnicate", p, 1, [(0, 0, 0, 0)])

    def test_preimage_needs_target(self):
        p = ThreefishParams(width=4, rounds=1, m=1)
        with pytest.raises(ValueError):
            skein_ideal("preimage", p, 1, [(0, 0, 0, 0)])


def test_rotation_schedule_constants():
    assert ROTATIONS == (
        (14, 16),
        (52, 57),
        (23, 40),
        (5, 37),
        (25, 33),
        (46, 12),
        (58, 22),
        (32, 32),
    )
    assert PERMUTE == (0, 3, 2, 1)
    assert SCHEDULE_CONST == 0x1BD11BDAA9FC1A22
