"""Compare the compiled and pure-Python Sturm kernels.

Usage: python benchmarks/bench_sturm.py [--cells 4000] [--repeat 5]
"""
import argparse
import math
import time

import numpy as np

from conespec import _sturm_py, kernels
from conespec.eigen import spindle_lambda1
from conespec.models import Spindle, sphere_section
from conespec.radial import Grid

try:
    from conespec import _sturm as _sturm_c
except ImportError:
    _sturm_c = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def use(mod):
    kernels.sturm_count = mod.sturm_count
    kernels.bisect_lowest = mod.bisect_lowest


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=4000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    M = args.cells
    d = rng.normal(size=M) + 4.0
    e2 = rng.random(M - 1)
    m = np.ones(M)
    sp = Spindle.closed(sphere_section(3, 1.2), 1.0)
    grid = Grid.uniform(0.0, math.pi, M)

    backends = [("python", _sturm_py)] + ([("cython", _sturm_c)] if _sturm_c else [])
    rows = []
    for name, mod in backends:
        use(mod)
        t_count = best_of(lambda: mod.sturm_count(d, e2, m, 4.0, 1e-300), args.repeat)
        t_bis = best_of(lambda: mod.bisect_lowest(d, e2, m, 3, -10.0, 20.0, 1e-10, 1e-14, 600, 1e-300), args.repeat)
        t_gap = best_of(lambda: spindle_lambda1(sp, grid), args.repeat)
        rows.append((name, t_count, t_bis, t_gap))
    print(f"M = {M} cells, best of {args.repeat}")
    print(f"{'backend':<8} {'sturm_count':>12} {'bisect(3)':>12} {'lambda1':>12}")
    for name, a, b, c in rows:
        print(f"{name:<8} {a * 1e3:>10.3f}ms {b * 1e3:>10.3f}ms {c * 1e3:>10.3f}ms")
    if len(rows) == 2:
        p, c = rows
        print(f"{'speedup':<8} {p[1] / c[1]:>11.1f}x {p[2] / c[2]:>11.1f}x {p[3] / c[3]:>11.1f}x")


if __name__ == "__main__":
    main()
