"""Benchmark: compiled vs pure-Python assignment kernels.

Times the three hot entry points on representative workloads and prints a
table with the speedup.  Run from the repo root after building the
extension in place:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from almqr import _kernels_py

try:
    from almqr import _fast
except ImportError:
    _fast = None


def timeit(fn, *args, repeat=5, min_time=0.2):
    best = np.inf
    for _ in range(repeat):
        n = 1
        while True:
            t0 = time.perf_counter()
            for _ in range(n):
                fn(*args)
            dt = time.perf_counter() - t0
            if dt > min_time:
                break
            n *= 2
        best = min(best, dt / n)
    return best


def workloads(rng):
    out = []
    for d in (2, 4, 6, 10):
        cost = rng.normal(size=(d, d)) ** 2
        out.append((f"solve_assignment d={d}", "solve_assignment", (cost,)))
    for d in (2, 6):
        P = rng.normal(size=(d, 3))
        Qs = rng.normal(size=(2000, d, 3))
        out.append((f"dist_sq_one_to_many d={d} m=2000", "dist_sq_one_to_many", (P, Qs)))
    Ps = rng.normal(size=(2000, 2, 2))
    Qs = rng.normal(size=(2000, 2, 2))
    out.append(("dist_sq_pairs d=2 m=2000", "dist_sq_pairs", (Ps, Qs)))
    return out


def main():
    rng = np.random.default_rng(0)
    rows = []
    for label, fname, args in workloads(rng):
        t_py = timeit(getattr(_kernels_py, fname), *args)
        if _fast is not None:
            t_c = timeit(getattr(_fast, fname), *args)
            rows.append((label, t_py, t_c, t_py / t_c))
        else:
            rows.append((label, t_py, None, None))

    width = max(len(r[0]) for r in rows)
    header = f"{'workload':<{width}}  {'python':>12}  {'compiled':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, t_py, t_c, speedup in rows:
        if t_c is None:
            print(f"{label:<{width}}  {t_py * 1e6:>10.1f}us  {'n/a':>12}  {'n/a':>8}")
        else:
            print(f"{label:<{width}}  {t_py * 1e6:>10.1f}us  {t_c * 1e6:>10.1f}us  {speedup:>7.1f}x")
    if _fast is None:
        print("\ncompiled backend not built; run: python setup.py build_ext --inplace")


if __name__ == "__main__":
    main()
