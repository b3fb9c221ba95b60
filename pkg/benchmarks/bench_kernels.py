"""Benchmark the jitted kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 1000 10000] [--dims 16 64]

The numba path is imported regardless of BLOCHBALL_BACKEND so both columns
always refer to the same build; run once to warm the JIT cache.
"""

import argparse
import time

import numpy as np

from blochball import kernels


def _time(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    parser.add_argument("--dims", type=int, nargs="+", default=[4, 16, 64])
    args = parser.parse_args()

    try:
        numba_mobius, numba_rho, numba_cover = kernels._build_numba_kernels()
    except ImportError:
        print("numba is not importable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'m':>8}{'n':>5}{'numpy':>12}{'numba':>12}{'speedup':>9}")
    for n in args.dims:
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a *= 0.6 / np.linalg.norm(a)
        for m in args.sizes:
            xs = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
            xs *= 0.8 * rng.uniform(size=(m, 1)) / np.linalg.norm(xs, axis=1, keepdims=True)
            ys = np.roll(xs, 1, axis=0)

            numba_mobius(a, xs[:2])  # warm the JIT before timing
            t_np = _time(kernels.mobius_apply_batch_np, a, xs)
            t_nb = _time(numba_mobius, a, xs)
            print(f"{'mobius_apply_batch':<22}{m:>8}{n:>5}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>9.2f}")

            numba_rho(xs[:2], ys[:2])
            t_np = _time(kernels.rho_pairs_np, xs, ys)
            t_nb = _time(numba_rho, xs, ys)
            print(f"{'rho_pairs':<22}{m:>8}{n:>5}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>9.2f}")

    pts = rng.standard_normal((4_000, 32))
    numba_cover(pts[:10], 1.0)
    for eps in (2.0, 1.0, 0.5):
        t_np = _time(kernels.greedy_cover_count_np, pts, eps, repeat=3)
        t_nb = _time(numba_cover, pts, eps, repeat=3)
        print(f"{'greedy_cover eps=' + str(eps):<22}{4000:>8}{32:>5}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>9.2f}")


if __name__ == "__main__":
    main()
