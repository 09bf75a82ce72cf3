"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from ruinwalk import _backend
from ruinwalk.core import log_factorial_table

PARAMS = (0.3, 0.5, 0.2)
LOGS = tuple(math.log(p) for p in PARAMS)


def cases(kern):
    lf = log_factorial_table(100_000)
    grid = np.zeros((31, 2001))
    counts = np.zeros(10_001, dtype=np.int64)
    return {
        "ruin_sum x=50 t=1e5": lambda: kern.ruin_sum(50, 100_000, *LOGS, lf),
        "ruin_sum x=5 t=200 (x1000)": lambda: [kern.ruin_sum(5, 200, *LOGS, lf) for _ in range(1000)],
        "hyp_terminating n=2000": lambda: kern.hyp_terminating(-2000, -1999.5, 51.0, 2.4, 2000),
        "dp_run 30 x 2000": lambda: kern.dp_run(30, 2000, *PARAMS, grid),
        "simulate 1e5 walks": lambda: kern.simulate_range(1, 0.3, 0.5, 10_000, 1, 0, 100_000, counts),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = _backend.available()
    if "compiled" not in names:
        print("compiled kernels not built; only the fallback is timed")
    results = {}
    for name in names:
        for label, fn in cases(_backend.load(name)).items():
            fn()  # warm-up
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results.setdefault(label, {})[name] = best
    width = max(len(k) for k in results)
    print(f"{'kernel':<{width}}  {'compiled':>12}  {'python':>12}  {'speed-up':>8}")
    for label, row in results.items():
        c, p = row.get("compiled"), row["python"]
        cs = f"{c * 1e3:10.3f}ms" if c else f"{'-':>12}"
        ratio = f"{p / c:7.1f}x" if c else f"{'-':>8}"
        print(f"{label:<{width}}  {cs}  {p * 1e3:10.3f}ms  {ratio}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
