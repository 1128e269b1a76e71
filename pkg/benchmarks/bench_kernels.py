#!/usr/bin/env python3
"""Benchmark: compiled (Cython) grid kernels vs the pure-numpy fallback.

Run after installing the package:

    python benchmarks/bench_kernels.py [--grid 600] [--depth 60] [--repeat 3]
"""

import argparse
import time

import numpy as np

from greenlinker import kernels, orbits
from greenlinker.maps import example_03
from greenlinker.skewdyn import fiber_context


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=600)
    ap.add_argument("--depth", type=int, default=60)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)}")

    f = example_03()
    spec = fiber_context(f, 0.99999, args.depth).spec
    xs = np.linspace(-3.25, 3.25, args.grid)
    W = (xs[None, :] + 1j * xs[:, None]).ravel()
    big = orbits.big_modulus(spec.d)
    rows, thr = spec.coeff_rows[:args.depth], spec.thresh[:args.depth]

    print(f"\nfiber escape grid, {args.grid}x{args.grid} px, depth {args.depth}:")
    results = {}
    for name, mod in backends.items():
        dt, out = bench(lambda m=mod: m.fiber_green_grid(rows, thr, W, big), args.repeat)
        results[name] = out
        px_rate = args.grid ** 2 / dt / 1e6
        print(f"  {name:8s} {dt * 1e3:8.1f} ms   ({px_rate:6.1f} Mpx/s)")
    if len(results) == 2:
        a, b = results["python"], results["cython"]
        same = (np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])
                and np.allclose(a[0], b[0], rtol=1e-13))
        print(f"  backends agree: {same}")

    c = (np.linspace(-2.5, 1.0, args.grid)[None, :]
         + 1j * np.linspace(-1.25, 1.25, args.grid)[:, None]).ravel()
    print(f"\nparameter plane, {args.grid}x{args.grid} px, max_iter 300:")
    for name, mod in backends.items():
        dt, _ = bench(lambda m=mod: m.mandelbrot_grid(c, 300), args.repeat)
        px_rate = args.grid ** 2 / dt / 1e6
        print(f"  {name:8s} {dt * 1e3:8.1f} ms   ({px_rate:6.1f} Mpx/s)")


if __name__ == "__main__":
    main()
