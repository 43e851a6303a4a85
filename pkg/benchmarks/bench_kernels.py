#!/usr/bin/env python3
"""Benchmark the compiled pair-loop kernels against the pure-Python fallback.

Times the three O(n^2)-ish hot loops on synthetic inputs and prints a
speedup table:

    python benchmarks/bench_kernels.py --sizes 500 2000 --repeats 3
"""

import argparse
import random
import time

import numpy as np

from datahighlights.kernels import _pair_py

try:
    from datahighlights.kernels import _pair_cy
except ImportError:
    _pair_cy = None


def best_of(repeats, fn):
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - start)
    return min(timings)


def bench_case(name, pure_fn, compiled_fn, repeats):
    pure = best_of(repeats, pure_fn)
    if compiled_fn is None:
        print(f"{name:<38} {pure * 1e3:>10.2f} ms {'-':>12} {'-':>9}")
        return
    compiled = best_of(repeats, compiled_fn)
    speedup = pure / compiled if compiled > 0 else float("inf")
    print(
        f"{name:<38} {pure * 1e3:>10.2f} ms {compiled * 1e3:>9.2f} ms {speedup:>8.1f}x"
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 2000])
    parser.add_argument("--grid", type=int, nargs=2, default=[60, 40], metavar=("ROWS", "COLS"))
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    if _pair_cy is None:
        print("compiled extension not built; timing the fallback only\n")

    print(f"{'kernel':<38} {'pure':>13} {'compiled':>12} {'speedup':>9}")
    for n in args.sizes:
        x = [rng.uniform(-100, 100) for _ in range(n)]
        y = [rng.uniform(-100, 100) for _ in range(n)]
        ax = np.ascontiguousarray(x)
        ay = np.ascontiguousarray(y)
        bench_case(
            f"kendall_pair_counts n={n}",
            lambda: _pair_py.kendall_pair_counts(x, y),
            (lambda: _pair_cy.kendall_pair_counts(ax, ay)) if _pair_cy else None,
            args.repeats,
        )
        bench_case(
            f"mann_kendall_s n={n}",
            lambda: _pair_py.mann_kendall_s(x),
            (lambda: _pair_cy.mann_kendall_s(ax)) if _pair_cy else None,
            args.repeats,
        )

    rows, cols = args.grid
    values = [[rng.uniform(0, 10) for _ in range(cols)] for _ in range(rows)]
    present = [[rng.random() < 0.9 for _ in range(cols)] for _ in range(rows)]
    av = np.ascontiguousarray(values)
    ap = np.ascontiguousarray(present, dtype=np.uint8)
    out = np.zeros((rows, rows), dtype=np.uint8)
    bench_case(
        f"dominance_matrix {rows}x{cols}",
        lambda: _pair_py.dominance_matrix(values, present),
        (lambda: _pair_cy.dominance_matrix(av, ap, out)) if _pair_cy else None,
        args.repeats,
    )


if __name__ == "__main__":
    main()
