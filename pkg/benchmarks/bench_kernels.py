"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Each workload is timed on
both backends (best of several repeats) and the outputs are checked to agree.
"""
import argparse
import math
import random
import time

import numpy as np

from swor_bounds.kernels import compiled_backend, python_backend


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def formula_grid(mod, lams):
    out = np.empty_like(lams)
    total = 0.0
    # one family per code with representative parameters
    cases = [
        (mod.GAUSS, (2.1,)),
        (mod.HUSH_SCOVEL, (100.0, 0.0105)),
        (mod.BERNSTEIN, (0.085, 1 / 3, 10.0)),
        (mod.BENNETT, (0.085, 0.085, 10.0)),
        (mod.SUBMAJOR, (0.09, 0.09, 10.0, 0.05)),
        (mod.LEON_PERRON, (100.0,)),
        (mod.LP_HYPER, (100.0, 2001.0)),
        (mod.TALAGRAND_POINT, (100.0, 0.05, 30.0)),
        (mod.TALAGRAND_TAIL, (-1.0, 100.0, 0.05, 30.0)),
    ]
    for code, args in cases:
        mod.formula_grid(code, lams, out, *args)
        total += float(np.sum(out[np.isfinite(out)]))
    return total


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=200_000, help="lambda points per formula family")
    ap.add_argument("--steps", type=int, default=50, help="technical lemma grid steps per axis")
    ap.add_argument("--subset-N", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()

    comp = compiled_backend
    if comp is None:
        print("compiled backend not built; only the Python backend is available")
        return
    py = python_backend
    lams = np.linspace(1e-3, 4.4, a.grid)
    rng = random.Random(1)
    values = [rng.random() for _ in range(a.subset_N)]
    n = a.subset_N // 2
    rates = [0.25, 0.5, 1.0, 2.0]
    knots = [n * j / 10 for j in range(1, 10)]

    workloads = [
        (f"formula_grid x9 families, {a.grid} points", lambda m: formula_grid(m, lams)),
        (f"technical_min_gap (49, 100), {a.steps}^3", lambda m: m.technical_min_gap(49, 100, a.steps)[0]),
        (f"subset_phi_means N={a.subset_N} n={n}", lambda m: m.subset_phi_means(values, n, rates, knots)[2]),
    ]
    print(f"{'workload':48s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}  agree")
    for name, fn in workloads:
        tp, op = best_of(lambda: fn(py), a.repeat)
        tc, oc = best_of(lambda: fn(comp), a.repeat)
        agree = math.isclose(op, oc, rel_tol=1e-12, abs_tol=1e-300)
        print(f"{name:48s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}x  {agree}")


if __name__ == "__main__":
    main()
