#!/usr/bin/env python3
"""Benchmark: compiled profile-evaluation kernel vs the numpy fallback.

The profile evaluation is the hot kernel of the whole package -- panel
quadrature, range scans and the variational weight assembly all funnel
through it.  This script times both backends on raw point batches and on
a representative end-to-end workload (the certified reciprocal-weight
integral over a window).

Usage: python benchmarks/bench_eval.py [--sizes 10000,100000,1000000]
"""

import argparse
import time

import numpy as np

from warpgap import WarpingParams, build_profile
from warpgap.backend import HAVE_KERNEL, eval_profile, eval_profile_pure


def _best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="10000,100000,1000000",
                        type=lambda s: [int(x) for x in s.split(",")])
    args = parser.parse_args()

    params = WarpingParams(2, 0.1)
    prof = build_profile(params)
    rng = np.random.default_rng(0)

    print(f"compiled kernel available: {HAVE_KERNEL}")
    print(f"{'points':>10} {'numpy (ms)':>12} {'kernel (ms)':>12} {'speedup':>9}")
    for size in args.sizes:
        t = rng.uniform(-100.0, 100.0, size)
        f_pure = lambda: eval_profile_pure(
            t, params.two_plus, params.alpha, params.eta_exp, prof.bridge)
        t_pure = _best_of(f_pure)
        if HAVE_KERNEL:
            f_kern = lambda: eval_profile(
                t, params.two_plus, params.alpha, params.eta_exp, prof.bridge)
            t_kern = _best_of(f_kern)
            print(f"{size:>10} {t_pure*1e3:>12.2f} {t_kern*1e3:>12.2f} "
                  f"{t_pure/t_kern:>8.2f}x")
        else:
            print(f"{size:>10} {t_pure*1e3:>12.2f} {'-':>12} {'-':>9}")

    # End-to-end: certified reciprocal-weight integral over [0, 40].
    from warpgap.functionals import frak_J

    t0 = time.perf_counter()
    res = frak_J(prof, 40.0)
    t_e2e = time.perf_counter() - t0
    backend = "kernel" if HAVE_KERNEL else "numpy"
    print(f"\nend-to-end frak_J(T=40) with {backend} backend: "
          f"{t_e2e*1e3:.1f} ms ({res.subdivisions} panels)")
    if HAVE_KERNEL:
        print("re-run with WARPGAP_PURE=1 to time the numpy fallback "
              "on the same workload")


if __name__ == "__main__":
    main()
