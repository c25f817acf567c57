"""Curve tables for the comparison figures and the crossover search."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .core_types import BoundsError, DomainError, UsageError
from .rank_tests import figure5_curves
from .registry import (
    POLE_BEARING,
    BoundId,
    conjectured_serfling,
    evaluate,
    evaluate_grid,
    input_for,
    prepare,
)
from .core_types import HGParams

GRID_STEPS = 400
POLE_FRACTION = 0.45
DEFAULT_LAMBDA_MAX = 3.0
BM_DELTA = 1e-7
CROSSOVER_SCAN = 200
CROSSOVER_TOL = 1e-9

FIG1_N = 2001
FIG1_D = 1000
FIG1_NS = (250, 1000)
FIG1B_LAMBDAS = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1))
FIG1B_NS = tuple(range(10, 1001, 10))
FIG2 = dict(N=2001, n=100, Ds=(200, 500))
FIG2_BOUNDS = (BoundId.serfling_hg, BoundId.hush_scovel, BoundId.bm_hg, BoundId.lp_hyper,
               BoundId.bennett_hyper, BoundId.bernstein_hyper, BoundId.talagrand_hyper_iii)
FIG3 = dict(N=2001, n=100, Ds=(101, 200))
FIG3_BOUNDS = (BoundId.serfling_hg, BoundId.chatterjee_general, BoundId.gi_hyper,
               BoundId.bm_general, BoundId.bennett_hyper)
FIGURES = ("fig1", "fig1b", "fig2", "fig3", "fig5")
COLUMNS = ("figure", "curve", "lambda", "raw", "clamped", "domain_ok")


@dataclass(frozen=True)
class Row:
    figure: str
    curve: str
    lam: float
    raw: float
    clamped: float
    domain_ok: bool

    def cells(self) -> tuple:
        return (self.figure, self.curve, self.lam, self.raw, self.clamped, self.domain_ok)


@dataclass(frozen=True)
class GridSpec:
    """Optional override of the frozen figure grids."""

    lam_min: Optional[float] = None
    lam_max: Optional[float] = None
    steps: Optional[int] = None

    def grid(self, default_max: float) -> np.ndarray:
        steps = GRID_STEPS if self.steps is None else self.steps
        if self.lam_min is None and self.lam_max is None:
            if steps < 1:
                raise UsageError("need at least one grid point")
            return default_max * np.arange(1, steps + 1) / steps
        lo = 0.0 if self.lam_min is None else self.lam_min
        hi = default_max if self.lam_max is None else self.lam_max
        if steps < 2 or not lo < hi:
            raise UsageError("grid needs steps >= 2 and lambda-min < lambda-max")
        return np.linspace(lo, hi, steps)


def default_lambda_max(bound: BoundId, n: int) -> float:
    return POLE_FRACTION * math.sqrt(n) if bound in POLE_BEARING else DEFAULT_LAMBDA_MAX


def bound_curve(figure: str, curve: str, bound: BoundId, n: int, D: int, N: int,
                spec: GridSpec = GridSpec(), **opts) -> list[Row]:
    lams = spec.grid(default_lambda_max(bound, n))
    inp = input_for(bound, n, D, N, delta=BM_DELTA if bound is BoundId.bm_general else None)
    raw, ok, _ = evaluate_grid(bound, inp, lams, **opts)
    return [Row(figure, curve, float(l), float(r), min(float(r), 1.0), bool(o))
            for l, r, o in zip(lams, raw, ok)]


def fig1(spec: GridSpec = GridSpec()) -> list[Row]:
    rows = []
    for n in FIG1_NS:
        rows += bound_curve("fig1", f"Bin n={n}", BoundId.leon_perron_bin, n, FIG1_D, FIG1_N, spec)
        rows += bound_curve("fig1", f"Hg n={n}", BoundId.lp_hyper, n, FIG1_D, FIG1_N, spec)
    return rows


def fig1b(ns: Sequence[int] = FIG1B_NS, lambdas: Sequence = FIG1B_LAMBDAS) -> list[Row]:
    """Binomial minus hypergeometric Leon-Perron bound at fixed lambda, n varying."""
    rows = []
    for lam in lambdas:
        for n in ns:
            b = evaluate(BoundId.leon_perron_bin, input_for(BoundId.leon_perron_bin, n, FIG1_D, FIG1_N), lam)
            h = evaluate(BoundId.lp_hyper, input_for(BoundId.lp_hyper, n, FIG1_D, FIG1_N), lam)
            diff = b.raw - h.raw
            rows.append(Row("fig1b", f"Bin-Hg n={n}", float(lam), diff,
                            min(b.clamped - h.clamped, 1.0), b.domain_ok and h.domain_ok))
    return rows


def fig2(spec: GridSpec = GridSpec()) -> list[Row]:
    rows = []
    for D in FIG2["Ds"]:
        for b in FIG2_BOUNDS:
            rows += bound_curve("fig2", f"{b.value} D={D}", b, FIG2["n"], D, FIG2["N"], spec)
    return rows


def fig3(spec: GridSpec = GridSpec()) -> list[Row]:
    rows = []
    n, N = FIG3["n"], FIG3["N"]
    for D in FIG3["Ds"]:
        for b in FIG3_BOUNDS:
            rows += bound_curve("fig3", f"{b.value} D={D}", b, n, D, N, spec)
        # comparator only: never reported as a valid bound
        params = HGParams(n, D, N)
        for lam in spec.grid(DEFAULT_LAMBDA_MAX):
            v = conjectured_serfling(params, float(lam))
            rows.append(Row("fig3", f"conjectured_serfling D={D}", float(lam), v, min(v, 1.0), False))
    return rows


def fig5(spec: GridSpec = GridSpec()) -> list[Row]:
    rows = []
    for kind, n, m in (("wilcoxon", 250, 250), ("klotz", 60, 440)):
        grid = None
        if spec != GridSpec():
            grid = spec.grid(DEFAULT_LAMBDA_MAX)
        for r in figure5_curves(kind, n, m, grid, fixture=True):
            rows.append(Row("fig5", f"{kind} {r['curve']}", r["lambda"], r["raw"], r["clamped"], r["domain_ok"]))
    return rows


def figure_rows(fig: str, spec: GridSpec = GridSpec()) -> list[Row]:
    if fig == "fig1":
        return fig1(spec)
    if fig == "fig1b":
        return fig1b()
    if fig == "fig2":
        return fig2(spec)
    if fig == "fig3":
        return fig3(spec)
    if fig == "fig5":
        return fig5(spec)
    raise UsageError(f"unknown figure {fig!r}; choose from {', '.join(FIGURES)}")


# --- crossover ------------------------------------------------------------------

def _raw(bound: BoundId, inp, lam: float) -> float:
    return evaluate(bound, inp, lam).raw


def crossover(bound_a: BoundId, bound_b: BoundId, n: int, D: int, N: int,
              lo: float = 0.0, hi: float = DEFAULT_LAMBDA_MAX,
              scan: int = CROSSOVER_SCAN, tol: float = CROSSOVER_TOL) -> list[float]:
    """Every lambda in (lo, hi] where raw(A) - raw(B) changes sign strictly.

    The bracket is scanned at ``scan`` points and each sign change refined
    by bisection to width ``tol``. Both bounds must satisfy their hypotheses.
    """
    bound_a, bound_b = BoundId(bound_a), BoundId(bound_b)
    if not lo < hi or scan < 2:
        raise UsageError("need lo < hi and scan >= 2")
    inp_a = input_for(bound_a, n, D, N, delta=BM_DELTA if bound_a is BoundId.bm_general else None)
    inp_b = input_for(bound_b, n, D, N, delta=BM_DELTA if bound_b is BoundId.bm_general else None)
    for b, inp in ((bound_a, inp_a), (bound_b, inp_b)):
        prep = prepare(b, inp)
        if not prep.ok:
            raise DomainError(f"{b.value}: {prep.msg}")
    lams = lo + (hi - lo) * np.arange(1, scan + 1) / scan
    ra, _, _ = evaluate_grid(bound_a, inp_a, lams)
    rb, _, _ = evaluate_grid(bound_b, inp_b, lams)
    diff = ra - rb
    found = []
    last = None
    for lam, d in zip(lams.tolist(), diff.tolist()):
        s = (d > 0) - (d < 0)
        if s == 0 or not math.isfinite(d):
            continue
        if last is not None and s != last[1]:
            found.append(_bisect(bound_a, inp_a, bound_b, inp_b, last[0], float(lam), last[1], tol))
        last = (float(lam), s)
    return found


def _bisect(ba, ia, bb, ib, left: float, right: float, left_sign: int, tol: float) -> float:
    while right - left > tol:
        mid = 0.5 * (left + right)
        d = _raw(ba, ia, mid) - _raw(bb, ib, mid)
        s = (d > 0) - (d < 0)
        if s == 0:
            return mid
        if s == left_sign:
            left = mid
        else:
            right = mid
    return 0.5 * (left + right)
