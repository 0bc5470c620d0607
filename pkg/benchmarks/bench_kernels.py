#!/usr/bin/env python3
"""Compare the numba and numpy row-reduction kernels over F_p.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

Both kernels are run on the same random matrices; their outputs are checked
to agree before timings are reported. The first numba call includes JIT
compilation (or cache loading) and is timed separately.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ptwist import _kernels

P = 32003


def _best(fn, a, repeat):
    best = float("inf")
    for _ in range(repeat):
        work = a.copy()
        t0 = time.perf_counter()
        fn(work, P)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _kernels.NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy kernel is available")
        return 1
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    _kernels.rref_modp_numba(rng.integers(0, P, (4, 4), dtype=np.int64), P)
    print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.3f} s")
    print(f"{'size':>6} {'rank':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for n in args.sizes:
        # rank-deficient on purpose so the pivot search is exercised
        a = rng.integers(0, P, (n, n // 2), dtype=np.int64) @ rng.integers(0, P, (n // 2, n), dtype=np.int64) % P
        x, y = a.copy(), a.copy()
        px = _kernels.rref_modp_numpy(x, P)
        py = _kernels.rref_modp_numba(y, P)
        if not (np.array_equal(px, py) and np.array_equal(x, y)):
            raise SystemExit(f"kernels disagree at size {n}")
        tn = _best(_kernels.rref_modp_numpy, a, args.repeat)
        tb = _best(_kernels.rref_modp_numba, a, args.repeat)
        print(f"{n:>6} {len(px):>6} {tn:>10.4f} {tb:>10.4f} {tn / tb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
