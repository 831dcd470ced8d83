"""Timing for the two hot kernels: compiled path vs numpy fallback.

OCCUTIME_NO_NUMBA is read once at import, so each mode runs in its own
child process.  Running this file with no arguments times both modes and
prints the speedup; --worker is the child entry point.

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np


def workload_euler():
    # OU-style drift/volatility over a long chain, as the simulator calls it
    from occutime.kernels import euler_chain

    def drift(x):
        return -1.5 * x

    def vol(x):
        return math.sqrt(1.0 + 0.1 * x * x)

    n = 1 << 13
    dt = 1.0 / n
    rng = np.random.default_rng(1)
    dws = rng.normal(0.0, math.sqrt(dt), size=(100, n))
    euler_chain(0.3, dt, dws[0], drift, vol)  # warmup / compile

    def run():
        acc = 0.0
        for dw in dws:
            acc += euler_chain(0.3, dt, dw, drift, vol)[-1]
        return acc

    return run


def workload_bound():
    # kernel-table contraction behind the Fourier-domain error bound
    from occutime.kernels import bound_accumulate, bound_point_tables

    tabs = bound_point_tables(32, 1.0, 0.7)
    uu = np.linspace(-8.0, 8.0, 129)
    coef = np.exp(-0.5 * uu * uu) * (16.0 / 128)
    bound_accumulate(uu, coef, *tabs)  # warmup / compile

    def run():
        return bound_accumulate(uu, coef, *tabs)

    return run


WORKLOADS = {"euler": workload_euler, "bound": workload_bound}


def time_workload(name, repeats):
    run = WORKLOADS[name]()
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--worker", choices=tuple(WORKLOADS), default=None)
    args = ap.parse_args()

    if args.worker:
        from occutime._accel import USE_NUMBA

        best = time_workload(args.worker, args.repeats)
        print(json.dumps({"numba": USE_NUMBA, "best_s": best}))
        return

    print(f"{'workload':<10} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name in WORKLOADS:
        times = {}
        for mode, flag in (("numba", ""), ("numpy", "1")):
            env = dict(os.environ, OCCUTIME_NO_NUMBA=flag)
            out = subprocess.run(
                [sys.executable, __file__, "--worker", name,
                 "--repeats", str(args.repeats)],
                env=env, capture_output=True, text=True, check=True,
            )
            payload = json.loads(out.stdout.strip().split("\n")[-1])
            assert payload["numba"] == (mode == "numba"), payload
            times[mode] = payload["best_s"]
        print(
            f"{name:<10} {times['numba']:>9.4f}s {times['numpy']:>9.4f}s "
            f"{times['numpy'] / times['numba']:>7.1f}x"
        )


if __name__ == "__main__":
    main()
