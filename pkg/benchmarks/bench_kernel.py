"""Benchmark the compiled episode kernel against its pure-Python twin.

Usage: python benchmarks/bench_kernel.py [T]
"""

import sys
import time

import numpy as np

from abex import build_schedule
from abex.environments import StationaryUniform, WeightedPricingModel
from abex.harness import checkpoint_grid
from abex.kernels import compiled_available, run_abe_episode


def run(backend, schedule, model, X, draws, checkpoints):
    start = time.perf_counter()
    cum, _ = run_abe_episode(schedule, model, X, draws, checkpoints,
                             force=backend)
    return cum, time.perf_counter() - start


def main():
    T = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    schedule = build_schedule(T, 2, 0.125, 0.5)
    model = WeightedPricingModel()
    rng = np.random.default_rng(123)
    X = StationaryUniform(2).generate(T, rng)
    draws = rng.random(T)
    checkpoints = checkpoint_grid(T)

    cum_py, t_py = run("python", schedule, model, X, draws, checkpoints)
    print(f"pure python : {t_py:8.3f}s  ({T / t_py:,.0f} periods/s)")

    if not compiled_available():
        print("compiled kernel not built; skipping comparison")
        return

    cum_c, t_c = run("compiled", schedule, model, X, draws, checkpoints)
    print(f"compiled    : {t_c:8.3f}s  ({T / t_c:,.0f} periods/s)")
    print(f"speedup     : {t_py / t_c:8.1f}x")
    match = "bitwise identical" if np.array_equal(cum_py, cum_c) else \
        f"max |diff| = {np.max(np.abs(cum_py - cum_c)):.3e}"
    print(f"traces      : {match}")


if __name__ == "__main__":
    main()
