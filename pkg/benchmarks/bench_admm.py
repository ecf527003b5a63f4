#!/usr/bin/env python3
"""Benchmark the compiled ADMM inner loop against the NumPy fallback.

Runs the same iteration kernel (identical inputs, fixed iteration budget, no
early stopping via tiny tolerances) under both implementations and reports
per-solve wall time plus the achieved speedup. Problem shapes mirror the
simulation protocol: a joint solve over K resampled subsets (dual-space
updates, L < n) and a single full-data LASSO (primal updates).
"""

import argparse
import time

import numpy as np

import bootsparse._admm_py as admm_py
from bootsparse.solver import _column_operator

try:
    import bootsparse._admm_cy as admm_cy
except ImportError:
    admm_cy = None


def make_case(rng, K, L, n, rho=1.0):
    pairs = [(rng.standard_normal((L, n)), rng.standard_normal(L)) for _ in range(K)]
    AtY = np.column_stack([A.T @ y for A, y in pairs])
    ops = [_column_operator(A, rho) for A, _ in pairs]
    A3 = np.ascontiguousarray(np.stack([A for A, _ in pairs]))
    W3 = np.ascontiguousarray(np.stack([w for w, _ in ops]))
    return A3, W3, AtY, ops[0][1]


def run(kernel, case, n, K, iters, repeats):
    A3, W3, AtY, wood = case
    best = float("inf")
    out = None
    for _ in range(repeats):
        Z = np.zeros((n, K))
        U = np.zeros((n, K))
        t0 = time.perf_counter()
        out = kernel.admm_iterate(A3, W3, AtY, Z, U, 1.0, 0.5, iters, 1e-300, 1e-300, wood)
        best = min(best, time.perf_counter() - t0)
    return best, out, Z


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--iters", type=int, default=500, help="fixed iteration count")
    ap.add_argument("--repeats", type=int, default=5, help="timing repeats (min taken)")
    args = ap.parse_args()

    if admm_cy is None:
        print("compiled extension not built; only the NumPy kernel is available")
        return

    rng = np.random.default_rng(0)
    cases = [
        ("joint K=30 L=40 n=200", 30, 40, 200),
        ("joint K=100 L=50 n=200", 100, 50, 200),
        ("lasso K=1 L=100 n=200", 1, 100, 200),
        ("small joint K=5 L=10 n=30", 5, 10, 30),
    ]
    print(f"{'case':28s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, K, L, n in cases:
        case = make_case(rng, K, L, n)
        t_py, out_py, Z_py = run(admm_py, case, n, K, args.iters, args.repeats)
        t_cy, out_cy, Z_cy = run(admm_cy, case, n, K, args.iters, args.repeats)
        drift = float(np.abs(Z_py - Z_cy).max())
        assert out_py[0] == out_cy[0], "iteration counts diverged"
        assert drift < 1e-8, f"kernels disagree: {drift:.2e}"
        print(
            f"{name:28s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms "
            f"{t_py / t_cy:7.2f}x"
        )


if __name__ == "__main__":
    main()
