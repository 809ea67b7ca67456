"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compile or cache load) is reported separately.
"""

import argparse
import time

import numpy as np

from sortnet_stein import kernels
from sortnet_stein.reduced_words import stanley_count
from sortnet_stein.wasserstein import DiscreteAtomLaw


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def crossing_inputs(ns):
    levels, lo, hi = [], [], []
    for n in ns:
        mu = DiscreteAtomLaw.first_letter(n)
        x = np.array(mu.locations)
        levels.append(mu.cumulative_floats()[:-1])
        lo.append(x[:-1])
        hi.append(x[1:])
    return np.concatenate(levels), np.concatenate(lo), np.concatenate(hi)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sweep-max", type=int, default=1000)
    args = ap.parse_args()

    total = stanley_count(6)
    t0 = time.perf_counter()
    kernels.dfs_enumerate_numba(6, total)
    first = time.perf_counter() - t0
    t_nb, a = best_of(lambda: kernels.dfs_enumerate_numba(6, total), args.repeat)
    t_np, b = best_of(lambda: kernels.frontier_enumerate_numpy(6, total), args.repeat)
    assert np.array_equal(a, b)
    print(f"enumerate n=6 ({total} words)")
    print(f"  numba  first call {first:8.3f} s   best {t_nb:8.4f} s")
    print(f"  numpy             {'':8}     best {t_np:8.4f} s   ratio {t_np / t_nb:6.1f}x")

    levels, lo, hi = crossing_inputs(range(2, args.sweep_max + 1))
    t0 = time.perf_counter()
    kernels.semicircle_crossings_numba(levels[:4], lo[:4], hi[:4], 2.0, -1.0)
    first = time.perf_counter() - t0
    t_nb, a = best_of(lambda: kernels.semicircle_crossings_numba(levels, lo, hi, 2.0, -1.0), args.repeat)
    t_np, b = best_of(lambda: kernels.semicircle_crossings_numpy(levels, lo, hi, 2.0, -1.0), args.repeat)
    print(f"crossings for n=2..{args.sweep_max} ({len(levels)} intervals, 60 bisection steps)")
    print(f"  numba  first call {first:8.3f} s   best {t_nb:8.4f} s")
    print(f"  numpy             {'':8}     best {t_np:8.4f} s   ratio {t_np / t_nb:6.1f}x")
    print(f"  max |numba - numpy| = {np.max(np.abs(a - b)):.1e}")


if __name__ == "__main__":
    main()
