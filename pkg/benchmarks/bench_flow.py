"""Compare the compiled kernels against the pure-numpy fallback.

The accelerated and fallback paths are selected at import time through the
ISO_GIRP_NUMBA environment variable, so the comparison runs the same workload
in two subprocesses and reports both timings side by side.

Usage: python3 benchmarks/bench_flow.py [--n 1200] [--reps 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload(n, reps):
    import numpy as np

    import isogirp

    rng = np.random.default_rng(7)
    timings = {}

    isogirp.warmup()

    pts = rng.random((n, 2)) * 3.0
    y = pts[:, 0] * pts[:, 1] + rng.normal(0.0, 2.0, n)
    t0 = time.perf_counter()
    dag = isogirp.dominance_order(pts)
    timings["dominance_order"] = time.perf_counter() - t0

    loss = isogirp.HuberLoss(0.5)
    for mode in ("original", "modified"):
        t0 = time.perf_counter()
        for _ in range(reps):
            isogirp.fit(y, dag, loss, mode=mode)
        timings["fit_%s" % mode] = (time.perf_counter() - t0) / reps

    m = 50_000
    chain = isogirp.PartialOrderDag(
        m, np.column_stack([np.arange(m - 1), np.arange(1, m)]))
    seq = rng.normal(0.0, 1.0, m)
    t0 = time.perf_counter()
    isogirp.pava(seq, chain, isogirp.SquaredLoss())
    timings["pava_chain"] = time.perf_counter() - t0

    small = isogirp.PartialOrderDag(
        6, np.array([[0, 2], [1, 2], [2, 3], [3, 4], [3, 5]]))
    vals = np.round(rng.normal(0.0, 1.0, 6), 2)
    grid = isogirp.GridSpec(-3.0, 3.0, 0.1)
    t0 = time.perf_counter()
    for _ in range(reps):
        isogirp.grid_optimum(vals, small, loss, grid)
    timings["grid_oracle"] = (time.perf_counter() - t0) / reps

    return timings


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1200,
                        help="nodes in the dominance-order instance")
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    if os.environ.get("_BENCH_CHILD"):
        print(json.dumps(workload(args.n, args.reps)))
        return

    results = {}
    for label, flag in (("compiled", "1"), ("fallback", "0")):
        env = dict(os.environ, ISO_GIRP_NUMBA=flag, _BENCH_CHILD="1")
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__),
             "--n", str(args.n), "--reps", str(args.reps)],
            capture_output=True, text=True, env=env, check=True)
        results[label] = json.loads(out.stdout.strip().splitlines()[-1])

    names = sorted(results["compiled"])
    width = max(len(s) for s in names)
    print("workload (n=%d)%s compiled    fallback    speedup"
          % (args.n, " " * (width - 14)))
    for name in names:
        fast = results["compiled"][name]
        slow = results["fallback"][name]
        print("%-*s  %8.4fs   %8.4fs   %6.1fx"
              % (width, name, fast, slow, slow / fast if fast > 0 else 0.0))


if __name__ == "__main__":
    main()
