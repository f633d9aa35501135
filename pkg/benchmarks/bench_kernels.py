"""Benchmark the compiled hot kernels against the pure Python fallbacks.

Runs each kernel on representative inputs and prints per-call timings plus
the speedup of the compiled extension.  If the extension is not built, only
the pure numbers are reported.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import random
import time

import numpy as np

from luxsim._kernels import pure

try:
    from luxsim._kernels import _fast
except ImportError:
    _fast = None


def make_board(size, seed):
    rng = np.random.default_rng(seed)
    res_kind = rng.integers(0, 4, size=(size, size), dtype=np.int8)
    res_amt = rng.integers(0, 500, size=(size, size), dtype=np.int64)
    return res_kind, res_amt


def bench_regrow(impl, repeats):
    boards = [make_board(32, seed) for seed in range(8)]
    t0 = time.perf_counter()
    for i in range(repeats):
        res_kind, res_amt = boards[i % len(boards)]
        impl.regrow_wood(res_kind, res_amt.copy(), 1, 0.025, 500)
    return (time.perf_counter() - t0) / repeats


def bench_water_fill(impl, repeats):
    rng = random.Random(3)
    cases = [
        (rng.randrange(0, 500), [rng.randrange(0, 30) for _ in range(rng.randrange(1, 5))])
        for _ in range(64)
    ]
    t0 = time.perf_counter()
    for i in range(repeats):
        amount, requests = cases[i % len(cases)]
        impl.water_fill(amount, requests)
    return (time.perf_counter() - t0) / repeats


def bench_diagonal(impl, repeats):
    rng = np.random.default_rng(7)
    grids = [(rng.random((32, 32)) < 0.55).astype(np.uint8) for _ in range(8)]
    t0 = time.perf_counter()
    for i in range(repeats):
        impl.diagonal_run_count(grids[i % len(grids)], 5)
    return (time.perf_counter() - t0) / repeats


BENCHES = [
    ("regrow_wood (32x32)", bench_regrow),
    ("water_fill (mixed)", bench_water_fill),
    ("diagonal_run_count (32x32)", bench_diagonal),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    if _fast is None:
        print("compiled extension not built; reporting pure timings only")
    for name, bench in BENCHES:
        pure_us = bench(pure, args.repeats) * 1e6
        line = f"{name:28s} pure {pure_us:9.2f} us"
        if _fast is not None:
            fast_us = bench(_fast, args.repeats) * 1e6
            line += f"   compiled {fast_us:9.2f} us   speedup {pure_us / fast_us:6.2f}x"
        print(line)


if __name__ == "__main__":
    main()
