"""Majorization of [0, 1]-valued populations by 0/1 populations.

Kemperman's single left-to-right pass turns any population on [0, 1] into
one made of 0s, 1s and at most one fractional element that majorizes it.
Rounding that element up gives a 0/1 population that weakly sub-majorizes
the input. Sample sums drawn without replacement inherit the convex order,
which is what :func:`verify_convex_order` checks by brute force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .core_types import BoundValue, DomainError, Population, UsageError
from .kernels import backend

FLOAT_TOL = 1e-9
MAX_ENUM_N = 16

# the documented test family
EXP_RATES = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))
HINGE_STEPS = 9


def _desc_partial_sums(values: Sequence) -> list:
    out = []
    acc = 0
    for v in sorted(values, reverse=True):
        acc += v
        out.append(acc)
    return out


def _leq(a, b, exact: bool) -> bool:
    return a <= b if exact else a <= b + FLOAT_TOL


def prec(x: Population, y: Population) -> bool:
    """True when x is majorized by y."""
    if x.N != y.N:
        raise UsageError("populations must have equal length")
    exact = x.exact and y.exact
    px, py = _desc_partial_sums(x.values), _desc_partial_sums(y.values)
    if not all(_leq(a, b, exact) for a, b in zip(px[:-1], py[:-1])):
        return False
    if exact:
        return px[-1] == py[-1]
    return abs(px[-1] - py[-1]) <= FLOAT_TOL


def prec_w(x: Population, y: Population) -> bool:
    """True when x is weakly sub-majorized by y (partial sums only)."""
    if x.N != y.N:
        raise UsageError("populations must have equal length")
    exact = x.exact and y.exact
    px, py = _desc_partial_sums(x.values), _desc_partial_sums(y.values)
    return all(_leq(a, b, exact) for a, b in zip(px, py))


@dataclass(frozen=True)
class MajorizationResult:
    output: Population
    ones: int
    zeros: int
    exceptional: Optional[object]
    exceptional_index: Optional[int]
    D_major: int
    alpha: object = field(repr=True)


def _check_unit(x: Population) -> None:
    if x.a < 0 or x.b > 1:
        raise DomainError("population values must lie in [0, 1]")


def kemperman_majorize(x: Population) -> MajorizationResult:
    """Kemperman's pass over the stored order.

    For each adjacent pair the running pair sum is split as (1, csum - 1)
    when csum > 1 and as (0, csum) otherwise; the carried value ends in the
    last slot.
    """
    _check_unit(x)
    m = list(x.values)
    for i in range(len(m) - 1):
        csum = m[i] + m[i + 1]
        if csum > 1:
            m[i], m[i + 1] = 1, csum - 1
        else:
            m[i], m[i + 1] = 0, csum
    if not x.exact:
        m = [float(v) for v in m]
        last = m[-1]
        if abs(last) <= FLOAT_TOL:
            m[-1] = 0.0
        elif abs(last - 1) <= FLOAT_TOL:
            m[-1] = 1.0
    else:
        m = [Fraction(v) for v in m]
    out = Population(m)
    ones = sum(1 for v in m if v == 1)
    zeros = sum(1 for v in m if v == 0)
    exceptional = None
    idx = None
    if ones + zeros < len(m):
        idx = len(m) - 1
        exceptional = m[idx]
    total = sum(x.values, Fraction(0) if x.exact else 0.0)
    d_major = math.floor(total + (0 if x.exact else FLOAT_TOL))
    alpha = total - d_major
    if not x.exact and abs(alpha) <= FLOAT_TOL:
        alpha = 0.0
    return MajorizationResult(out, ones, zeros, exceptional, idx, d_major, alpha)


def sub_majorize(x: Population) -> Population:
    """0/1 population that weakly sub-majorizes x."""
    res = kemperman_majorize(x)
    vals = list(res.output.values)
    if res.exceptional_index is not None:
        vals[res.exceptional_index] = 1
    return Population([int(v) if x.exact else float(int(v)) for v in vals])


@lru_cache(maxsize=256)
def unit_summary(pop: Population) -> tuple:
    """(ones of majorizer, alpha, ones of sub-majorizer, mean) of (c-a)/(b-a)."""
    d = pop.shifted_unit()
    res = kemperman_majorize(d)
    d_sub = res.ones + (1 if res.exceptional_index is not None else 0)
    return res.ones, res.alpha, d_sub, d.mean


# --- convex order by enumeration -------------------------------------------

@dataclass(frozen=True)
class Violation:
    phi: str
    n: int
    lhs: float
    rhs: float


@dataclass
class ConvexOrderReport:
    n: int
    family: str
    checks: int = 0
    violations: list = field(default_factory=list)
    worst_margin: float = math.inf

    @property
    def ok(self) -> bool:
        return not self.violations


def _integer_scale(values: Sequence[Fraction]) -> tuple[list[int], int]:
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return [int(v * den) for v in values], den


def _subset_sum_counts(ints: Sequence[int], n: int) -> dict[int, int]:
    """Multiplicity of every n-subset sum, by dynamic programming on size."""
    layers: list[dict[int, int]] = [{0: 1}] + [dict() for _ in range(n)]
    for v in ints:
        for size in range(min(n, len(ints)), 0, -1):
            src = layers[size - 1]
            if not src:
                continue
            dst = layers[size]
            for s, c in src.items():
                dst[s + v] = dst.get(s + v, 0) + c
    return layers[n]


def _family(n: int, family: str, scale: int):
    """(name, exact functional, float functional, normalizer) tuples.

    Exact functionals act on integer sums S = scale * s and return integers
    equal to phi(s) times the positive normalizer.
    """
    phis = []
    for r in EXP_RATES:
        fr = float(r)
        phis.append((f"exp({r}*s)", None, lambda S, fr=fr: math.exp(fr * S / scale), 1))
    for j in range(1, HINGE_STEPS + 1):
        # knot c = n*j/10, so 10*S - n*j*scale = 10*scale*(s - c)
        knot = n * j * scale
        phis.append((f"max(s-{Fraction(n * j, 10)},0)", lambda S, knot=knot: max(10 * S - knot, 0), None, 10 * scale))
    phis.append(("s^2", lambda S: S * S, None, scale * scale))
    if family == "convex":
        phis.append(("-s", lambda S: -S, None, scale))
        phis.append((f"(s-{n})^2", lambda S: (S - n * scale) ** 2, None, scale * scale))
    return phis


def verify_convex_order(x: Population, y: Population, n: int, phis: str = "increasing") -> ConvexOrderReport:
    """Check E phi(sum of n draws from x) <= E phi(sum from y) exactly.

    ``phis`` is ``"increasing"`` for the documented family of increasing
    convex functions, or ``"convex"`` to add two non-increasing convex
    members, which only majorization (not sub-majorization) supports.
    Exponentials are compared in floats with relative slack 1e-12; all other
    members are compared in exact integer arithmetic.
    """
    if x.N != y.N:
        raise UsageError("populations must have equal length")
    if x.N > MAX_ENUM_N:
        raise UsageError(f"enumeration is limited to N <= {MAX_ENUM_N}")
    if not 1 <= n <= x.N:
        raise UsageError("need 1 <= n <= N")
    if phis not in ("increasing", "convex"):
        raise UsageError(f"unknown family {phis!r}")
    xs = [Fraction(v) for v in x.values]
    ys = [Fraction(v) for v in y.values]
    ints, scale = _integer_scale(xs + ys)
    cx = _subset_sum_counts(ints[: x.N], n)
    cy = _subset_sum_counts(ints[x.N:], n)
    report = ConvexOrderReport(n=n, family=phis)
    total = math.comb(x.N, n)
    for name, exact_fn, float_fn, norm in _family(n, phis, scale):
        report.checks += 1
        if exact_fn is not None:
            lhs = sum(c * exact_fn(S) for S, c in cx.items())
            rhs = sum(c * exact_fn(S) for S, c in cy.items())
            bad = lhs > rhs
            lhs_f = lhs / (total * norm)
            rhs_f = rhs / (total * norm)
            margin = (rhs - lhs) / (total * norm)
        else:
            lhs_f = math.fsum(c * float_fn(S) for S, c in cx.items()) / total
            rhs_f = math.fsum(c * float_fn(S) for S, c in cy.items()) / total
            margin = rhs_f - lhs_f
            bad = lhs_f > rhs_f * (1 + 1e-12)
        report.worst_margin = min(report.worst_margin, margin)
        if bad:
            report.violations.append(Violation(name, n, lhs_f, rhs_f))
    return report


def convex_order_float(values: Sequence[float], n: int) -> tuple:
    """Float enumeration of the same family through the compiled kernel."""
    rates = [float(r) for r in EXP_RATES]
    knots = [n * j / 10 for j in range(1, HINGE_STEPS + 1)]
    return backend.subset_phi_means([float(v) for v in values], n, rates, knots)


# --- Chernoff bound through the sub-majorizing population ---------------------

def chernoff_submajor(pop: Population, n: int, lam: float, r_choice: str = "optimal") -> BoundValue:
    """Chernoff bound for the sample mean of ``pop`` via sub-majorization.

    The population is mapped to [0, 1]; its sub-majorizing 0/1 population
    supplies gamma^2 = sigma^2 (1 - f_n). ``r_choice="r2"`` uses the rate
    log(1 + t/(n gamma^2)) and reproduces the registry's closed form;
    ``"optimal"`` uses the exact minimiser of the exponent.
    """
    if r_choice not in ("optimal", "r2"):
        raise UsageError("r_choice must be 'optimal' or 'r2'")
    N = pop.N
    if not 1 <= n < N:
        raise DomainError("need 1 <= n < N")
    if lam < 0:
        raise DomainError("need lambda >= 0")
    _, _, d_sub, dbar = unit_summary(pop)
    if pop.exact:
        room = dbar + Fraction(1, N) <= Fraction(1, 2)
    else:
        room = float(dbar) + 1 / N <= 0.5 + FLOAT_TOL
    if not room:
        raise DomainError("sub-majorization route needs mean + 1/N <= 1/2")
    if not 1 <= n <= min(d_sub, N - d_sub):
        raise DomainError("need n <= min(D_sub, N - D_sub)")
    span = float(pop.span)
    mu = Fraction(d_sub, N)
    gamma2 = float(mu * (1 - mu) * (1 - Fraction(n - 1, N - 1)))
    t = math.sqrt(n) * lam / span
    if lam == 0:
        return BoundValue.make(1.0)
    if r_choice == "r2":
        r = math.log1p(t / (n * gamma2))
    else:
        r = math.log1p((N * t - n) / (n * N * gamma2))
        if r <= 0:
            return BoundValue.make(1.0)
    exponent = r * n / N - r * t + n * gamma2 * (math.expm1(r) - r)
    return BoundValue.make(math.exp(exponent))
