"""Compare the compiled transport kernel against the pure-Python fallback.

Usage: python benchmarks/bench_transport.py [--sizes 5,10,20,40] [--reps 50]

Both kernels implement the same successive-shortest-path algorithm; this
script times them on identical random instances and checks that the values
agree, so the fallback can be trusted when the extension is unavailable.
"""

import argparse
import time

import numpy as np

from srwdro import _transport_py
from srwdro.transport import kernel_name, solve_transport


def bench(solver, instances, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        for cost, a, b in instances:
            solver(cost, a, b)
        best = min(best, time.perf_counter() - t0)
    return best / len(instances)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="5,10,20,40")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if kernel_name() != "compiled":
        print("note: compiled kernel unavailable, timing the fallback twice")
    rng = np.random.default_rng(args.seed)
    print(f"{'m':>5} {'selected (' + kernel_name() + ')':>22} "
          f"{'pure python':>14} {'speedup':>8}")
    for m in [int(s) for s in args.sizes.split(",")]:
        instances = []
        for _ in range(10):
            cost = rng.uniform(0, 1, (m, m))
            instances.append((cost, rng.dirichlet(np.ones(m)),
                              rng.dirichlet(np.ones(m))))
        for cost, a, b in instances:
            v1, _ = solve_transport(cost, a, b)
            v2, _ = _transport_py.solve_transport(cost, a, b)
            assert abs(v1 - v2) < 1e-10, "kernels disagree"
        t_sel = bench(solve_transport, instances, args.reps)
        t_py = bench(_transport_py.solve_transport, instances, args.reps)
        print(f"{m:>5} {t_sel * 1e6:>18.1f} us {t_py * 1e6:>11.1f} us "
              f"{t_py / t_sel:>7.1f}x")


if __name__ == "__main__":
    main()
