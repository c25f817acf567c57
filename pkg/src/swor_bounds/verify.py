"""Mechanical checks of every bound and lemma against exact computation.

Three suites:

* ``dominance``: each guaranteed bound against exact tails on a grid of
  hypergeometric scenarios;
* ``kernels``: the analytic ingredients (pmf and tail lemmas, technical
  lemma, Stirling, Bennett's psi, the rate function);
* ``orders``: majorization and the convex order on {0, 1/14, ..., 1}
  and a seeded random corpus.

``SWOR_BOUNDS_THREADS`` sets the number of worker processes (default 1).
"""
from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import proof_kernels as pk
from .core_types import BinParams, BoundsError, HGParams, Population, threshold_k0
from .kernels import backend
from .majorization import (
    kemperman_majorize,
    prec,
    prec_w,
    sub_majorize,
    verify_convex_order,
)
from .oracle import binom_tail_weights, hg_tail_weights, hg_weights
from .registry import (
    INPUT_KIND,
    NOT_GUARANTEED,
    TWO_SIDED,
    BoundId,
    evaluate_prepared,
    input_for,
    prepare,
)

DOMINANCE_NS = (10, 25, 50, 100, 200)
GRID_POINTS = 50
TOL = 1e-12
KERNEL_MAX_N = 120
TECHNICAL_CASES = ((5, 20), (10, 50), (49, 100))
ORDERS_CORPUS = 1000
ORDERS_MAX_N = 12
ORDERS_SEED = 20240601
MAX_WITNESSES = 20

GUARANTEED = tuple(b for b in BoundId if b not in NOT_GUARANTEED)
BINOMIAL_KIND = frozenset(b for b in BoundId if INPUT_KIND[b] is BinParams)


@dataclass
class CheckStats:
    """Count and worst margin (bound minus target) for one named check."""

    checks: int = 0
    worst: float = math.inf
    witness: Optional[tuple] = None

    def add(self, margins: np.ndarray, witness_of: Callable[[int], tuple]) -> None:
        if len(margins) == 0:
            return
        self.checks += len(margins)
        i = int(np.argmin(margins))
        if margins[i] < self.worst:
            self.worst = float(margins[i])
            self.witness = witness_of(i)

    def merge(self, other: "CheckStats") -> None:
        self.checks += other.checks
        if other.worst < self.worst:
            self.worst = other.worst
            self.witness = other.witness


@dataclass
class SuiteReport:
    name: str
    stats: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    failure_count: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    @property
    def checks(self) -> int:
        return sum(s.checks for s in self.stats.values())

    def stat(self, key: str) -> CheckStats:
        return self.stats.setdefault(key, CheckStats())

    def fail(self, witness: tuple) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_WITNESSES:
            self.failures.append(witness)

    def merge(self, other: "SuiteReport") -> None:
        for key, st in other.stats.items():
            self.stat(key).merge(st)
        self.failure_count += other.failure_count
        for w in other.failures:
            if len(self.failures) < MAX_WITNESSES:
                self.failures.append(w)

    def lines(self) -> list[str]:
        out = [f"[{self.name}] {'PASS' if self.ok else 'FAIL'}: {self.checks} checks, "
               f"{self.failure_count} failures, {self.seconds:.1f}s"]
        for key in sorted(self.stats):
            st = self.stats[key]
            out.append(f"  {key}: checks={st.checks} worst_margin={st.worst!r} at {st.witness}")
        for w in self.failures:
            out.append(f"  violation: {w}")
        return out


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("SWOR_BOUNDS_THREADS", "1")))
    except ValueError:
        return 1


def _fan_out(fn: Callable, tasks: Sequence, workers: Optional[int] = None) -> list:
    """Map in order, over a process pool when more than one worker is asked for."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# --- dominance ------------------------------------------------------------------

class _Tails:
    """Float images of exact hypergeometric tails, indexed by integer count."""

    def __init__(self, n: int, D: int, N: int):
        kmin, tails, total = hg_tail_weights(n, D, N)
        self.n, self.D, self.N = n, D, N
        self.kmin = kmin
        self.kmax = kmin + len(tails) - 2
        self.mu = Fraction(D, N)
        self.center = n * D / N
        # int / int is correctly rounded
        self.upper = np.array([t / total for t in tails])
        self.lower = np.array([(total - t) / total for t in tails])
        _, w, _ = hg_weights(n, D, N)
        self.pmf = np.array([x / total for x in w])

    def upper_at(self, ks: np.ndarray) -> np.ndarray:
        """P(S >= k)."""
        idx = np.clip(ks - self.kmin, 0, len(self.upper) - 1)
        return self.upper[idx]

    def lower_at(self, js: np.ndarray) -> np.ndarray:
        """P(S <= j) = 1 - P(S >= j+1)."""
        idx = np.clip(js + 1 - self.kmin, 0, len(self.lower) - 1)
        return self.lower[idx]


def thresholds(n: int, mu: Fraction, lams: np.ndarray) -> np.ndarray:
    """Exact k0 = ceil(n mu + sqrt(n) lam) for every lam (float fast path,
    exact rational decision near integers)."""
    x = float(n * mu) + math.sqrt(n) * lams
    ks = np.ceil(x).astype(np.int64)
    near = np.abs(x - np.round(x)) < 1e-7
    for i in np.nonzero(near)[0]:
        ks[i] = threshold_k0(n, mu, float(lams[i]))
    return ks


def lower_thresholds(n: int, mu: Fraction, lams: np.ndarray) -> np.ndarray:
    """Largest j with j <= n mu - sqrt(n) lam, exactly."""
    return -thresholds(n, -mu, lams)


@lru_cache(maxsize=8192)
def _binom_upper(n: int, p: Fraction) -> np.ndarray:
    tails, den = binom_tail_weights(n, p)
    return np.array([t / den for t in tails])


def lambda_grid(lo: float, hi: float, points: int = GRID_POINTS) -> np.ndarray:
    """``points`` values strictly inside (lo, hi)."""
    return lo + (hi - lo) * np.arange(1, points + 1) / (points + 1)


def _dominance_one(bound: BoundId, n: int, D: int, N: int, tails: _Tails, report: SuiteReport) -> None:
    inp = input_for(bound, n, D, N)
    try:
        prep = prepare(bound, inp, t=1.0)
    except BoundsError:
        return
    if not prep.ok:
        return
    sqrt_n = math.sqrt(n)
    up_span = (tails.kmax - tails.center) / sqrt_n
    down_span = (tails.center - tails.kmin) / sqrt_n
    stat = report.stat(bound.value)

    if bound is BoundId.talagrand_hyper_i:
        ks = np.arange(math.floor(tails.center) + 1, tails.kmax + 1)
        if len(ks) > GRID_POINTS:
            ks = ks[np.linspace(0, len(ks) - 1, GRID_POINTS).round().astype(int)]
        lams = (ks - tails.center) / sqrt_n
        raw, _ = evaluate_prepared(prep, lams)
        target = tails.pmf[ks - tails.kmin]
        _record(stat, report, bound, n, D, N, lams, raw, target)
        return

    top = max(up_span, down_span) if bound in TWO_SIDED else up_span
    lo = 0.0 if bound is BoundId.talagrand_hyper_ii else prep.lam_lo
    hi = min(prep.lam_hi, top)
    if not hi > lo:
        return
    lams = lambda_grid(lo, hi)

    if bound is BoundId.talagrand_hyper_ii:
        # bound at lam covers the event at t = lam/2
        raw = np.array([backend.formula(prep.code, lam, lam / 2, *prep.args[1:]) for lam in lams])
        event = lams / 2
    else:
        raw, ok = evaluate_prepared(prep, lams)
        lams, raw = lams[ok], raw[ok]
        event = lams

    if bound in BINOMIAL_KIND:
        p = Fraction(D, N)
        upper = _binom_upper(n, p)
        ks = thresholds(n, p, event)
        target = upper[np.clip(ks, 0, n + 1)]
    else:
        ks = thresholds(n, tails.mu, event)
        target = tails.upper_at(ks)
        if bound in TWO_SIDED:
            js = lower_thresholds(n, tails.mu, event)
            target = target + tails.lower_at(js)
    _record(stat, report, bound, n, D, N, lams, raw, target)


def _record(stat, report, bound, n, D, N, lams, raw, target) -> None:
    margins = raw - target
    stat.add(margins, lambda i: (n, D, N, float(lams[i])))
    for i in np.nonzero(margins < -TOL)[0]:
        report.fail((bound.value, n, D, N, float(lams[i]), float(raw[i]), float(target[i])))


def _dominance_task(task: tuple) -> SuiteReport:
    N, Ds, bounds = task
    report = SuiteReport("dominance")
    for D in Ds:
        for n in range(1, N):
            tails = _Tails(n, D, N)
            for b in bounds:
                _dominance_one(b, n, D, N, tails, report)
    return report


def run_dominance(Ns: Iterable[int] = DOMINANCE_NS, bounds: Iterable[BoundId] = GUARANTEED,
                  workers: Optional[int] = None) -> SuiteReport:
    """Every guaranteed bound against exact tails, for all 1 <= n, D < N."""
    start = time.perf_counter()
    bounds = tuple(BoundId(b) for b in bounds)
    tasks = []
    for N in Ns:
        Ds = list(range(1, N))
        chunk = max(1, len(Ds) // 8)
        for i in range(0, len(Ds), chunk):
            tasks.append((N, tuple(Ds[i:i + chunk]), bounds))
    report = SuiteReport("dominance")
    for part in _fan_out(_dominance_task, tasks, workers):
        report.merge(part)
    report.seconds = time.perf_counter() - start
    return report


# --- kernels ----------------------------------------------------------------------

def _ge_exact(x: float, num: int, den: int) -> bool:
    """x >= num/den, decided exactly."""
    p, q = x.as_integer_ratio()
    return p * den >= num * q


def _pmf_deviate_task(N: int) -> SuiteReport:
    report = SuiteReport("kernels")
    stat = report.stat("pmf_deviate_bound")
    for D in range(2, N // 2 + 1):
        for n in range(2, D):
            params = HGParams(n, D, N)
            kmin, w, total = hg_weights(n, D, N)
            k_lo = max(1, -(-n * D // N))
            for k in range(k_lo, n):
                bound = pk.pmf_deviate_bound(params, k)
                pmf = w[k - kmin]
                margin = bound - pmf / total
                stat.add(np.array([margin]), lambda i: (n, D, N, k))
                if not _ge_exact(bound, pmf, total):
                    report.fail(("pmf_deviate_bound", n, D, N, k, bound, pmf / total))
    return report


def _tail_ratio_task(N: int) -> SuiteReport:
    """Integer form of P(S=k) k (N-D-n+k) >= P(S>=k) (N k - n D)."""
    report = SuiteReport("kernels")
    stat = report.stat("tail_ratio_bound")
    checks = 0
    worst = math.inf
    witness = None
    for D in range(1, N):
        for n in range(1, N):
            kmin, tails, total = hg_tail_weights(n, D, N)
            kmax = kmin + len(tails) - 2
            k_lo = max(kmin, n * D // N + 1)
            for k in range(k_lo, kmax + 1):
                i = k - kmin
                lhs = (tails[i] - tails[i + 1]) * k * (N - D - n + k)
                rhs = tails[i] * (N * k - n * D)
                checks += 1
                if lhs < rhs:
                    report.fail(("tail_ratio_bound", n, D, N, k))
                rel = (lhs - rhs) / (N * k - n * D) / total
                if rel < worst:
                    worst, witness = rel, (n, D, N, k)
    stat.checks += checks
    if worst < stat.worst:
        stat.worst, stat.witness = worst, witness
    return report


def _kernel_task(task: tuple) -> SuiteReport:
    kind, N = task
    return _pmf_deviate_task(N) if kind == "pmf" else _tail_ratio_task(N)


def _small_kernels(report: SuiteReport, steps: int) -> None:
    st = report.stat("technical_lemma_gap")
    for n, N in TECHNICAL_CASES:
        gap, mu, u, gamma = pk.technical_lemma_min_gap(n, N, steps)
        st.add(np.array([gap]), lambda i: (n, N, mu, u, gamma))
        if gap < -TOL:
            report.fail(("technical_lemma_gap", n, N, mu, u, gamma, gap))

    st = report.stat("stirling_envelope")
    for n in range(1, 26):
        lo, hi = pk.stirling_envelope(n)
        f = math.factorial(n)
        ok = Fraction(lo) <= f <= Fraction(hi)
        st.add(np.array([min(f - lo, hi - f) / f]), lambda i: (n,))
        if not ok:
            report.fail(("stirling_envelope", n, lo, hi))

    st = report.stat("psi_bernstein_floor")
    vs = np.concatenate([[0.0], np.logspace(-6, 4, 999)])
    vals = np.array([pk.psi_bennett(float(v)) for v in vs])
    margins = vals - 1.0 / (1.0 + vs / 3.0)
    st.add(margins, lambda i: (float(vs[i]),))
    for i in np.nonzero(margins < -TOL)[0]:
        report.fail(("psi_bennett", float(vs[i]), float(vals[i])))

    st = report.stat("big_psi_quartic_floor")
    st2 = report.stat("big_psi_second_derivative")
    h = 1e-5
    for mu in np.linspace(0.02, 0.98, 25):
        for u in np.linspace(0.0, 1 - mu, 27)[:-1]:
            val = pk.big_psi(float(u), float(mu))
            floor = 2 * u * u + u ** 4 / 3
            st.add(np.array([val - floor]), lambda i: (float(u), float(mu)))
            if val < floor - TOL:
                report.fail(("big_psi_quartic_floor", float(u), float(mu), val))
            if h < u < 1 - mu - h:
                fd = (pk.big_psi(u + h, mu) - 2 * val + pk.big_psi(u - h, mu)) / (h * h)
                closed = pk.big_psi_second_derivative(float(u), float(mu))
                lower = 4.0 * (1.0 + 4.0 * (u - (0.5 - mu)) ** 2)
                rel = (fd - closed) / closed
                st2.add(np.array([1e-4 - abs(rel)]), lambda i: (float(u), float(mu)))
                if abs(rel) > 1e-4 or fd < lower * (1 - 1e-4):
                    report.fail(("big_psi_second_derivative", float(u), float(mu), fd, closed))


def run_kernels(max_N: int = KERNEL_MAX_N, steps: int = 50, workers: Optional[int] = None) -> SuiteReport:
    start = time.perf_counter()
    report = SuiteReport("kernels")
    tasks = [("pmf", N) for N in range(4, max_N + 1)] + [("tail", N) for N in range(5, max_N + 1)]
    # largest first for better load balance
    tasks.sort(key=lambda t: -t[1])
    for part in _fan_out(_kernel_task, tasks, workers):
        report.merge(part)
    _small_kernels(report, steps)
    report.seconds = time.perf_counter() - start
    return report


# --- orders -----------------------------------------------------------------------

def fourteenths_population() -> Population:
    return Population([Fraction(i, 14) for i in range(15)])


def random_unit_population(rng: random.Random, max_N: int = ORDERS_MAX_N) -> Population:
    N = rng.randint(2, max_N)
    den = rng.randint(1, 12)
    return Population([Fraction(rng.randint(0, den), den) for _ in range(N)])


def _orders_one(x: Population, report: SuiteReport, tag: str) -> None:
    res = kemperman_majorize(x)
    sub = sub_majorize(x)
    st = report.stat("majorization_predicates")
    good = prec(x, res.output) and prec_w(x, sub) and sum(res.output.values) == sum(x.values)
    st.checks += 1
    if not good:
        report.fail(("predicates", tag, x.values))
    for n in range(1, x.N + 1):
        for label, y, fam in (("major", res.output, "increasing"), ("submajor", sub, "increasing"),
                              ("major_s2", res.output, "convex")):
            rep = verify_convex_order(x, y, n, fam)
            st = report.stat(f"convex_order_{label}")
            st.checks += rep.checks
            if rep.worst_margin < st.worst:
                st.worst, st.witness = rep.worst_margin, (tag, n)
            for v in rep.violations:
                report.fail((label, tag, n, v.phi, v.lhs, v.rhs))


def _orders_task(task: tuple) -> SuiteReport:
    seed, count = task
    rng = random.Random(seed)
    report = SuiteReport("orders")
    for j in range(count):
        _orders_one(random_unit_population(rng), report, f"random[{seed}:{j}]")
    return report


def run_orders(corpus: int = ORDERS_CORPUS, seed: int = ORDERS_SEED,
               workers: Optional[int] = None) -> SuiteReport:
    start = time.perf_counter()
    report = SuiteReport("orders")
    _orders_one(fourteenths_population(), report, "fourteenths")
    per = 100
    tasks = [(seed + i, min(per, corpus - i * per)) for i in range(-(-corpus // per))]
    for part in _fan_out(_orders_task, tasks, workers):
        report.merge(part)
    report.seconds = time.perf_counter() - start
    return report


SUITES = {"dominance": run_dominance, "kernels": run_kernels, "orders": run_orders}


def run(suite: str) -> list[SuiteReport]:
    if suite == "all":
        return [fn() for fn in SUITES.values()]
    return [SUITES[suite]()]
