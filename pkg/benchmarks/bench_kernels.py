#!/usr/bin/env python3
"""Benchmark the compiled closure kernels against the numpy fallback.

Two views:

* microbenchmark of the three kernels (residuals, Jacobian, Hessian of the
  Lagrangian) across stage counts, comparing both backends in-process;
* an end-to-end multistart solve of the bundled 4-node example, run in
  subprocesses so the import-time backend selection (MDI_PURE_PYTHON)
  takes effect.

Usage: python benchmarks/bench_kernels.py [--end-to-end]
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from mdinterp import _kernels_py
from mdinterp import kernels

try:
    from mdinterp import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best * 1e6  # microseconds


def micro():
    rng = np.random.default_rng(0)
    backends = [("python", _kernels_py)]
    if _ckernels is not None:
        backends.insert(0, ("compiled", _ckernels))
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'N':>3} {'kernel':<10} " + " ".join(f"{n:>12}" for n, _ in backends) + "  speedup")
    for n in (1, 3, 5, 19):
        nodes = rng.uniform(-2, 2, (n + 1, 2))
        xi = rng.uniform(0, 1.5, 5 * n)
        nu = rng.normal(size=2 * n + 2)
        args = (xi, nodes, -1.0, 0.7, 3.0)
        repeat = 2000 if n < 10 else 500
        for label, getter in (
            ("residuals", lambda m: (lambda: m.closure_residuals(*args))),
            ("jacobian", lambda m: (lambda: m.closure_jacobian(*args))),
            ("hessian", lambda m: (lambda: m.lagrangian_hessian(*args, nu))),
        ):
            times = [_time(getter(mod), repeat) for _, mod in backends]
            speedup = times[-1] / times[0] if len(times) == 2 else float("nan")
            cols = " ".join(f"{t:>9.1f} us" for t in times)
            print(f"{n:>3} {label:<10} {cols}  {speedup:>6.1f}x")


def end_to_end():
    script = (
        "import time, json, sys\n"
        "from mdinterp import kernels, solve, parse_problem\n"
        "from mdinterp.nlp import SolverConfig\n"
        "doc = json.load(open(sys.argv[1]))\n"
        "spec = parse_problem(doc)\n"
        "t0 = time.perf_counter()\n"
        "out = solve(spec, SolverConfig(multistart_count=8, random_seed=0))\n"
        "dt = time.perf_counter() - t0\n"
        "print(f'{kernels.BACKEND:>9}: {dt:6.2f}s  best {out.best.total_length:.12f}')\n"
    )
    problem = Path(__file__).resolve().parent.parent / "problems" / "example1.json"
    for pure in ("", "1"):
        env = dict(os.environ)
        if pure:
            env["MDI_PURE_PYTHON"] = pure
        else:
            env.pop("MDI_PURE_PYTHON", None)
        subprocess.run([sys.executable, "-c", script, str(problem)], env=env, check=True)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--end-to-end", action="store_true", help="also time a full solve")
    opts = parser.parse_args()
    micro()
    if opts.end_to_end:
        print("\nmultistart solve of problems/example1.json (8 starts):", flush=True)
        end_to_end()
