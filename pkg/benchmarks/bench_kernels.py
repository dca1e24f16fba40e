"""Timing of the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--suite]

``--suite`` also times one small end-to-end suite in two subprocesses, one
with ``AMPLETHETA_DISABLE_NUMBA=1``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from ampletheta import _accel, kernels


def _best(fn, repeat: int) -> float:
    fn()  # warm-up (jit compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _workloads():
    rng = np.random.default_rng(0)
    tau3 = np.array([[1.2j, 0.2 + 0.1j, 0.1], [0.2 + 0.1j, 0.9j, 0.3j], [0.1, 0.3j, 1.1j]])
    z3 = rng.normal(size=3) + 0.1j * rng.normal(size=3)
    m3 = np.zeros(3)
    c3 = np.zeros(3, dtype=np.int64)
    zs = rng.uniform(0, 5, 4000) + 1j * rng.uniform(-1, 1, 4000)
    tau1 = 0.4 + 1.1j
    return {
        "theta_box g=3 r=8": (lambda: kernels.theta_box_jit(tau3, z3, m3, c3, 8),
                              lambda: kernels.theta_box_np(tau3, z3, m3, c3, 8)),
        "vartheta_grid n=4000 d=9": (lambda: kernels.vartheta_grid_jit(tau1, zs, 9, 6, False),
                                     lambda: kernels.vartheta_grid_np(tau1, zs, 9, 6, False)),
        "vartheta_grid deriv": (lambda: kernels.vartheta_grid_jit(tau1, zs, 9, 6, True),
                                lambda: kernels.vartheta_grid_np(tau1, zs, 9, 6, True)),
    }


def _suite_time(disable: bool) -> float:
    env = dict(os.environ)
    env.pop("AMPLETHETA_DISABLE_NUMBA", None)
    if disable:
        env["AMPLETHETA_DISABLE_NUMBA"] = "1"
    code = ("import time; from ampletheta.config import loads; from ampletheta.harness import run_suite;"
            "c = loads('suite = \"bpf\"\\ng = 3\\nd = 5\\nsamples = 256\\nrefine_starts = 2');"
            "run_suite(c); t = time.perf_counter(); run_suite(c); print(time.perf_counter() - t)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--suite", action="store_true", help="also time an end-to-end suite")
    args = p.parse_args(argv)
    if not _accel.HAS_NUMBA:
        print("numba unavailable; nothing to compare")
        return 1
    print(f"{'kernel':28s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speed-up':>9s}")
    for name, (fast, slow) in _workloads().items():
        a, b = _best(fast, args.repeat), _best(slow, args.repeat)
        print(f"{name:28s} {1e3 * a:11.2f} {1e3 * b:11.2f} {b / a:9.1f}")
    if args.suite:
        a, b = _suite_time(False), _suite_time(True)
        print(f"{'suite bpf (3,5) small':28s} {1e3 * a:11.0f} {1e3 * b:11.0f} {b / a:9.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
