#!/usr/bin/env python3
"""Benchmark the pure-numpy stepping kernel against the compiled one.

Usage: python benchmarks/bench_stepping.py [--repeats N]
"""

import argparse
import time

import numpy as np

from lislam import _stepping
from lislam.observer import init_auxiliary
from lislam.simkit import reference_scenario
from lislam.slam_core import build_structural

CASES = [
    ("reference 10 s @ 500 Hz, euler", dict(duration_s=10.0, rate_hz=500.0, integrator="euler")),
    ("reference 10 s @ 500 Hz, rk4", dict(duration_s=10.0, rate_hz=500.0, integrator="rk4")),
    ("verification 2 s @ 10 kHz, rk4", dict(duration_s=2.0, rate_hz=10000.0, integrator="rk4")),
]


def run_case(cfg, backend):
    sm = build_structural(cfg.n, cfg.g)
    z = init_auxiliary(cfg.gains, sm)
    steps = int(round(cfg.duration_s * cfg.rate_hz))
    omega = np.tile([0.0, 0.0, 1.0], (steps, 1))
    accel = np.tile([-1.0, 0.0, -cfg.g], (steps, 1))
    x0, xh0 = cfg.true_init.pose(), cfg.est_init.pose()
    start = time.perf_counter()
    _stepping.propagate(
        x0.r, x0.v_block, xh0.r, xh0.v_block, omega, accel,
        1.0 / cfg.rate_hz, cfg.g,
        cfg.gains.k_r, cfg.gains.k_v, cfg.gains.k_x, cfg.gains.k_p,
        z.v_z[:, 0], z.v_z[:, 1],
        method=cfg.integrator, backend=backend,
    )
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = _stepping.available_backends()
    print(f"available backends: {', '.join(backends)}")
    header = f"{'case':38s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))

    for name, overrides in CASES:
        cfg = reference_scenario(**overrides)
        best = {}
        for backend in backends:
            best[backend] = min(run_case(cfg, backend) for _ in range(args.repeats))
        row = f"{name:38s}" + "".join(f"{best[b] * 1e3:10.1f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{best['pure'] / best['compiled']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
