"""Compare the Cython kernels against the NumPy fallback.

Usage: python3 benchmarks/bench_backends.py [--quick]

Each row times one hot path on both backends (best of `repeat` runs)
and reports the speedup.  Results are also sanity-checked for
equality, so a mismatch shows up here before it shows up in a long
Monte Carlo run.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from truncarx._kernels import fallback as py_kernel
from truncarx.sensitivity import SkeinCompression
from truncarx.threefish import ThreefishParams

try:
    from truncarx._kernels import _core as cy_kernel
except ImportError:
    cy_kernel = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if cy_kernel is None:
        raise SystemExit("cython backend not built; nothing to compare")

    count = 200_000 if args.quick else 2_000_000
    trials = 20_000 if args.quick else 200_000
    xs = py_kernel.gen_words(1, 0, count, 64)
    ys = py_kernel.gen_words(1, count, count, 64)
    blocks = py_kernel.gen_words(2, 0, 4 * (count // 16), 64).reshape(-1, 4)
    key = tuple(int(w) for w in py_kernel.gen_words(3, 0, 4, 64))
    tweak = tuple(int(w) for w in py_kernel.gen_words(3, 4, 2, 64))
    params = ThreefishParams(m=9)
    sk = SkeinCompression()

    cases = [
        (
            f"trunc_add_batch m=9 n=64 ({count:,} pairs)",
            lambda k: k.trunc_add_batch(xs, ys, 9, 64),
        ),
        (
            f"trunc_add_scan_batch m=9 n=64 ({count:,} pairs)",
            lambda k: k.trunc_add_scan_batch(xs, ys, 9, 64),
        ),
        (
            f"agreement_sample_count n=64 m=9 ({trials:,} trials)",
            lambda k: k.agreement_sample_count(64, 9, trials, 42),
        ),
        (
            f"encrypt_batch R=72 m=9 ({blocks.shape[0]:,} blocks)",
            lambda k: k.encrypt_batch(key, tweak, blocks, params),
        ),
        (
            f"skein_match_counts ms=8..10 ({trials:,} trials)",
            lambda k: k.skein_match_counts(
                sk.CHAIN, sk.TWEAK, sk.params, [8, 9, 10], 1, 0, trials
            ),
        ),
    ]

    width = max(len(name) for name, _ in cases)
    print(f"{'case':<{width}}  {'python':>9}  {'cython':>9}  speedup")
    for name, fn in cases:
        got_py = fn(py_kernel)
        got_cy = fn(cy_kernel)
        if isinstance(got_py, np.ndarray):
            assert (got_py == got_cy).all(), name
        else:
            assert list(np.atleast_1d(got_py)) == list(np.atleast_1d(got_cy)), name
        t_py = best_of(lambda: fn(py_kernel), args.repeat)
        t_cy = best_of(lambda: fn(cy_kernel), args.repeat)
        print(f"{name:<{width}}  {t_py:>8.3f}s  {t_cy:>8.3f}s  {t_py / t_cy:>6.1f}x")


if __name__ == "__main__":
    main()
