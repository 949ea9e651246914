#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

The same kernels power per-step game math (tiny batches) and the sampled
property checkers (large batches), so both regimes are timed.  Run:

    python benchmarks/bench_kernels.py [--sizes 16,1024,100000] [--repeat 7]

The active backend for library use is picked by the PURSUIT_NUMBA env
flag; this script times both backends side by side regardless, plus one
end-to-end pursuit game per backend via subprocess with the flag set.

Note: the metric-tree backend is plain Python (graph walks at desk scale,
nothing to vectorize), so only the coordinate-space kernels appear here.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from geopursuit import _kernels as K  # noqa: E402


def make_args(name, n, rng):
    a = np.ascontiguousarray(rng.uniform(-0.7, 0.7, (n, 2)))
    b = np.ascontiguousarray(rng.uniform(-0.7, 0.7, (n, 2)))
    ang_a = np.ascontiguousarray(rng.uniform(0, 1, n))
    ang_b = np.ascontiguousarray(rng.uniform(0, 1, n))
    frac = np.ascontiguousarray(rng.uniform(0, 1, n))
    s = np.ascontiguousarray(rng.uniform(0, 1, n))
    return {
        "dist_euclid": (a, b),
        "dist_euclid_one": (a[0], b),
        "dist_cheb": (a, b),
        "dist_cheb_one": (a[0], b),
        "dist_circle": (ang_a, ang_b, 1.0),
        "interp_rows": (a, b, frac),
        "segment_points": (a[0], b[0], s, 1.25),
        "circle_arc_points": (0.3, 1.0, s, 1.0),
        "circle_interp_pairs": (ang_a, ang_b, frac, 1.0, 1.0),
        "disk_clip_frac": (a, b, 1.0),
    }[name]


def best_of(fn, args, repeat, inner):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_kernels(sizes, repeat):
    backends = K.available_backends()
    rng = np.random.default_rng(0)
    print(f"backends: {', '.join(backends)} "
          f"(library default: {K.active_backend()})")
    header = f"{'kernel':<22}{'n':>9}" + "".join(
        f"{name + ' us':>14}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name in K.KERNEL_NAMES:
        for n in sizes:
            args = make_args(name, n, rng)
            inner = max(1, int(2000 / max(1, n // 64)))
            times = {}
            for backend in backends:
                fn = K.get_backend(backend)[name]
                fn(*args)  # warm (JIT compile / cache load)
                times[backend] = best_of(fn, args, repeat, inner)
            row = f"{name:<22}{n:>9}" + "".join(
                f"{1e6 * times[b]:>14.2f}" for b in backends)
            if len(backends) == 2:
                ratio = times["numpy"] / times["numba"]
                row += f"{ratio:>9.1f}x"
            print(row)


GAME_SNIPPET = r"""
import time
import numpy as np
import geopursuit as gp
from geopursuit import _kernels
disk = gp.EuclideanDiskSpace(1.0)
cfg = gp.GameConfig(epsilon=0.05, horizon_steps=16000, substep=0.005)
L0, M0 = disk.point(-0.5, 0.0), disk.point(0.5, 0.0)
gp.run_game(disk, cfg, L0, M0, gp.GreedyMaxDistance(32), seed=1)  # warm
t0 = time.time()
trace, out = gp.run_game(disk, cfg, L0, M0, gp.GreedyMaxDistance(32), seed=1)
dt = time.time() - t0
steps = len(trace.moments) - 1
print(f"{_kernels.active_backend():>6}: {steps} steps in {dt:.3f} s "
      f"({1e6 * dt / steps:.1f} us/step), outcome {out}")
"""


def bench_game():
    print("\nend-to-end greedy pursuit game (eps=0.05, k=32):", flush=True)
    env = dict(os.environ)
    src = os.path.join(os.path.dirname(__file__), "..", "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    for flag in ("1", "0"):
        env["PURSUIT_NUMBA"] = flag
        subprocess.run([sys.executable, "-c", GAME_SNIPPET], env=env,
                       check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,1024,100000")
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--skip-game", action="store_true")
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",") if tok]
    bench_kernels(sizes, args.repeat)
    if not args.skip_game:
        bench_game()


if __name__ == "__main__":
    main()
