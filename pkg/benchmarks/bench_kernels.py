"""Compare the numba and pure-numpy modular elimination kernels.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 50 100 200 400] [--repeat 5] [--seed 0]

Each backend is run on the same random integer matrices (rank-deficient by
construction) and on dense copies of Hochschild slice matrices; ranks must
agree before timings are reported.  The environment flag CURVEDHH_NUMBA=0 is
also checked end to end in a subprocess.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from curvedhh.linalg import kernels
from curvedhh.linalg.kernels import LARGE_PRIME, rank_modp


def _random_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """An n×n integer matrix of rank about 3n/4."""
    k = max(1, 3 * n // 4)
    L = rng.integers(-5, 6, size=(n, k))
    R = rng.integers(-5, 6, size=(k, n))
    return L @ R


def _slice_matrices(cap: int, window: tuple) -> list:
    from curvedhh.curved import curved_algebra
    from curvedhh.hochschild import HochschildTruncation, one_object
    from curvedhh.exactalg.scalars import QQ
    alg = curved_algebra(QQ, ["x", "y"], [1, 1], "0", ground="field")
    T = HochschildTruncation(one_object(alg), cap, window)
    out = []
    for p, w in T.slices():
        M = T.slice_matrix(p, w)
        if M.nrows and M.ncols:
            D = np.zeros((M.nrows, M.ncols), dtype=np.int64)
            for i, row in enumerate(M.rows):
                for j, v in row.items():
                    D[i, j] = int(v) % LARGE_PRIME
            out.append(D)
    return out


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(mats: list, repeat: int) -> tuple[float, float]:
    r_np = [rank_modp(A, backend="numpy") for A in mats]
    r_nb = [rank_modp(A, backend="numba") for A in mats]   # also triggers compilation
    if r_np != r_nb:
        raise SystemExit(f"rank mismatch between backends: {r_np} vs {r_nb}")
    t_np = _time(lambda: [rank_modp(A, backend="numpy") for A in mats], repeat)
    t_nb = _time(lambda: [rank_modp(A, backend="numba") for A in mats], repeat)
    return t_np, t_nb


def env_flag_check() -> dict:
    code = "from curvedhh.linalg.kernels import active_backend; print(active_backend())"
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, CURVEDHH_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        out[flag] = res.stdout.strip() or res.stderr.strip()
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cap", type=int, default=4, help="bar-length cap for the Hochschild workload")
    args = ap.parse_args(argv)

    if not kernels.HAVE_NUMBA:
        print("numba backend unavailable (CURVEDHH_NUMBA=0 or numba not installed); nothing to compare")
        return 0
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':<28}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for n in args.sizes:
        mats = [_random_matrix(rng, n) for _ in range(3)]
        t_np, t_nb = bench(mats, args.repeat)
        print(f"{f'random {n}x{n} (x3)':<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
    mats = _slice_matrices(args.cap, (0, 4))
    t_np, t_nb = bench(mats, args.repeat)
    label = f"HH slices Q[x,y] N={args.cap} ({len(mats)})"
    print(f"{label:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
    flags = env_flag_check()
    print(f"CURVEDHH_NUMBA=1 -> {flags['1']}, CURVEDHH_NUMBA=0 -> {flags['0']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
