#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the NumPy fallback.

Times the pairwise primitives (density, gradient, Hessian, mean-shift
ascent) on Gaussian test data across a range of problem sizes, checks
that both implementations agree, and prints a speedup table.

Usage:
  python benchmarks/compare_backends.py
  python benchmarks/compare_backends.py --sizes 500 2000 --dim 3 --repeats 5
"""

import argparse
import time

import numpy as np

from modehunt import backend
from modehunt.kde import normal_scale_bandwidth


def best_of(repeats, fn, *args):
    """Minimum wall time over ``repeats`` calls (first result returned too)."""
    result = fn(*args)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def run_case(n, d, repeats, rng):
    data = rng.normal(size=(n, d))
    queries = rng.normal(size=(min(n, 200), d))
    h = normal_scale_bandwidth(n, d)
    ops = [
        ("density", lambda m: m.density(data, queries, h)),
        ("gradient", lambda m: m.gradient(data, queries, h)),
        ("hessian", lambda m: m.hessian(data, queries, h)),
        ("mean_shift", lambda m: m.mean_shift(data, queries, h, 1e-6 * h, 10_000)),
    ]
    rows = []
    for name, op in ops:
        timings = {}
        results = {}
        for which in backend.available():
            module = backend.select(which)
            timings[which], results[which] = best_of(repeats, op, module)
        if len(results) == 2:
            got = results["c"][0] if name == "mean_shift" else results["c"]
            want = results["numpy"][0] if name == "mean_shift" else results["numpy"]
            err = float(np.max(np.abs(np.asarray(got) - np.asarray(want))))
        else:
            err = float("nan")
        rows.append((name, timings, err))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000],
                        help="training sample sizes to benchmark (default: 500 2000 8000)")
    parser.add_argument("--dim", type=int, default=2, help="dimension (default: 2)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats per op; best is reported (default: 3)")
    parser.add_argument("--seed", type=int, default=0, help="data seed (default: 0)")
    args = parser.parse_args()

    names = backend.available()
    print(f"backends available: {', '.join(names)}")
    if "c" not in names:
        print("compiled core not built; timing the NumPy fallback only")
    rng = np.random.default_rng(args.seed)

    header = f"{'n':>6} {'d':>2} {'op':<11}"
    for which in names:
        header += f" {which + ' (ms)':>12}"
    if len(names) == 2:
        header += f" {'speedup':>8} {'max|diff|':>10}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        for name, timings, err in run_case(n, args.dim, args.repeats, rng):
            line = f"{n:>6} {args.dim:>2} {name:<11}"
            for which in names:
                line += f" {timings[which] * 1e3:>12.3f}"
            if len(names) == 2:
                line += f" {timings['numpy'] / timings['c']:>7.1f}x {err:>10.2e}"
            print(line)
    backend.select("auto")


if __name__ == "__main__":
    main()
