#!/usr/bin/env python3
"""Benchmark the compiled eigenvalue kernels against the pure-Python fallback.

Runs Hessenberg reduction + shifted QR on random dense complex matrices and
reports wall times plus the maximum matched eigenvalue disagreement between
the two backends.

    python benchmarks/bench_eig.py [--sizes 64,128,256,512] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from esspec import numerics


def match_error(a: np.ndarray, b: np.ndarray) -> float:
    pool = list(b)
    worst = 0.0
    for z in a:
        j = min(range(len(pool)), key=lambda k: abs(pool[k] - z))
        worst = max(worst, abs(pool[j] - z))
        pool.pop(j)
    return worst


def bench(kernels, matrix: np.ndarray, repeats: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = numerics.eigenvalues(matrix, kernels=kernels)
        best = min(best, time.perf_counter() - t0)
    return best, result.eigenvalues


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="64,128,256,512")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    compiled = numerics.compiled_kernels()
    fallback = numerics.python_kernels()
    print(f"active backend: {numerics.BACKEND}")
    if compiled is None:
        print("compiled extension not built; benchmarking the fallback only")
    header = f"{'n':>6} {'python [s]':>12}"
    if compiled is not None:
        header += f" {'compiled [s]':>13} {'speedup':>8} {'max |diff|':>11}"
    print(header)

    rng = np.random.default_rng(20240817)
    for n in sizes:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        t_py, eig_py = bench(fallback, a, args.repeats)
        line = f"{n:>6} {t_py:>12.3f}"
        if compiled is not None:
            t_cy, eig_cy = bench(compiled, a, args.repeats)
            line += f" {t_cy:>13.3f} {t_py / t_cy:>8.1f} {match_error(eig_py, eig_cy):>11.2e}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
