#!/usr/bin/env python3
"""Benchmark the walk's two kernel backends (numba @njit vs pure numpy).

Times sample_partial_coloring on square Bernoulli(1/2) instances at a few
sizes and prints a per-backend table.  The numpy path is the one selected by
CARABAL_PURE_NUMPY=1; run this script to see what that flag costs.

    python3 benchmarks/bench_walk.py [--sizes 32,64,128,256] [--reps 20]
"""

import argparse
import time

import numpy as np

import carabal._kernels as kernels
from carabal.instances import spencer_instance
from carabal.walk import WalkConfig, min_delta, sample_partial_coloring


def time_backend(backend, A, delta, reps, seed):
    kernels.set_backend(backend)
    cfg = WalkConfig(delta_cap=delta)
    rng = np.random.default_rng(seed)
    n = A.n
    sample_partial_coloring(A, np.zeros(n), cfg, rng)  # warm-up / JIT
    t0 = time.perf_counter()
    steps = 0
    for _ in range(reps):
        steps += sample_partial_coloring(A, np.zeros(n), cfg, rng).steps_used
    elapsed = time.perf_counter() - t0
    return elapsed / reps, elapsed / max(steps, 1)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,64,128,256")
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(t) for t in args.sizes.split(",")]

    backends = ["numpy"]
    if kernels._HAVE_NUMBA:
        backends.insert(0, "numba")
    else:
        print("numba not importable; timing the numpy path only")

    print(f"{'n':>6} {'backend':>8} {'ms/sample':>12} {'us/step':>10} {'speedup':>9}")
    original = kernels.current_backend()
    try:
        for n in sizes:
            A = spencer_instance(n, n, 0.5, np.random.default_rng(args.seed))
            delta = min_delta(A)
            per_sample = {}
            for backend in backends:
                sample_t, step_t = time_backend(backend, A, delta,
                                                args.reps, args.seed)
                per_sample[backend] = sample_t
                speedup = ""
                if backend == "numpy" and "numba" in per_sample:
                    speedup = f"{per_sample['numpy'] / per_sample['numba']:.1f}x"
                print(f"{n:>6} {backend:>8} {sample_t * 1e3:>12.3f} "
                      f"{step_t * 1e6:>10.1f} {speedup:>9}")
    finally:
        kernels.set_backend(original)


if __name__ == "__main__":
    main()
