"""Exact hypergeometric and binomial probabilities in rational arithmetic."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .core_types import (
    DomainError,
    ExactProb,
    HGParams,
    NumericError,
    UsageError,
    to_exact,
)


@lru_cache(maxsize=4096)
def hg_weights(n: int, D: int, N: int) -> tuple[int, tuple[int, ...], int]:
    """Return ``(kmin, weights, total)`` with P(S=k) = weights[k-kmin]/total.

    Weights are C(D,k)C(N-D,n-k), built by an exact integer recurrence.
    """
    kmin = max(0, n - (N - D))
    kmax = min(D, n)
    w = math.comb(D, kmin) * math.comb(N - D, n - kmin)
    out = [w]
    for k in range(kmin, kmax):
        w = w * (D - k) * (n - k) // ((k + 1) * (N - D - n + k + 1))
        out.append(w)
    return kmin, tuple(out), math.comb(N, n)


@lru_cache(maxsize=4096)
def hg_tail_weights(n: int, D: int, N: int) -> tuple[int, tuple[int, ...], int]:
    """Like :func:`hg_weights` but with upper-tail sums sum_{j>=k} weights."""
    kmin, w, total = hg_weights(n, D, N)
    tails = [0] * (len(w) + 1)
    for i in range(len(w) - 1, -1, -1):
        tails[i] = tails[i + 1] + w[i]
    return kmin, tuple(tails), total


def hg_pmf(params: HGParams, k: int) -> ExactProb:
    """P(S = k); zero outside the support."""
    kmin, w, total = hg_weights(params.n, params.D, params.N)
    i = k - kmin
    if i < 0 or i >= len(w):
        return ExactProb(0, 1, 0.0)
    return ExactProb.of(Fraction(w[i], total))


def hg_tail(params: HGParams, k: int) -> ExactProb:
    """P(S >= k)."""
    kmin, tails, total = hg_tail_weights(params.n, params.D, params.N)
    i = max(k - kmin, 0)
    if i >= len(tails) - 1:
        return ExactProb(0, 1, 0.0)
    return ExactProb.of(Fraction(tails[i], total))


def hg_pmf_vector(params: HGParams) -> list[Fraction]:
    """P(S=k) for k = 0..n."""
    kmin, w, total = hg_weights(params.n, params.D, params.N)
    out = [Fraction(0)] * (params.n + 1)
    for i, wi in enumerate(w):
        out[kmin + i] = Fraction(wi, total)
    return out


def _check_p(p) -> Fraction:
    p = to_exact(p)
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return p


def binom_pmf(n: int, p, k: int) -> ExactProb:
    p = _check_p(p)
    if n < 0:
        raise DomainError("n must be non-negative")
    if k < 0 or k > n:
        return ExactProb(0, 1, 0.0)
    return ExactProb.of(math.comb(n, k) * p**k * (1 - p) ** (n - k))


def binom_tail(n: int, p, k: int) -> ExactProb:
    p = _check_p(p)
    k = max(k, 0)
    if k > n:
        return ExactProb(0, 1, 0.0)
    num, den = p.numerator, p.denominator
    rest = den - num
    s = sum(math.comb(n, j) * num**j * rest ** (n - j) for j in range(k, n + 1))
    return ExactProb.of(Fraction(s, den**n))


def binom_tail_weights(n: int, p) -> tuple[tuple[int, ...], int]:
    """Integer upper-tail numerators over the common denominator q**n."""
    p = _check_p(p)
    num, den = p.numerator, p.denominator
    rest = den - num
    w = [math.comb(n, j) * num**j * rest ** (n - j) for j in range(n + 1)]
    tails = [0] * (n + 2)
    for j in range(n, -1, -1):
        tails[j] = tails[j + 1] + w[j]
    return tuple(tails), den**n


def tv_distance(params: HGParams) -> ExactProb:
    """Total variation distance between Hyp(n, D, N) and Bin(n, D/N)."""
    n = params.n
    p = params.mu
    hg = hg_pmf_vector(params)
    total = Fraction(0)
    for k in range(n + 1):
        total += abs(hg[k] - math.comb(n, k) * p**k * (1 - p) ** (n - k))
    return ExactProb.of(total / 2)


def ehm_tv_bound_exact(params: HGParams) -> Fraction:
    n, N = params.n, params.N
    mu = params.mu
    if N == 1:
        return Fraction(0)
    return Fraction(n, n + 1) * (1 - mu ** (n + 1) - (1 - mu) ** (n + 1)) * Fraction(n - 1, N - 1)


def ehm_tv_bound(params: HGParams) -> float:
    """Ehm's upper bound on the total variation distance to the binomial."""
    return float(ehm_tv_bound_exact(params))


# --- float path for large populations -------------------------------------

def hg_logpmf_float(params: HGParams, k: int) -> float:
    """log P(S=k) through log-gamma; for N beyond exact-arithmetic comfort."""
    lo, hi = params.support
    if not lo <= k <= hi:
        return -math.inf
    n, D, N = params.n, params.D, params.N
    lg = math.lgamma
    return (
        lg(D + 1) - lg(k + 1) - lg(D - k + 1)
        + lg(N - D + 1) - lg(n - k + 1) - lg(N - D - n + k + 1)
        - (lg(N + 1) - lg(n + 1) - lg(N - n + 1))
    )


def hg_tail_float(params: HGParams, k: int) -> float:
    lo, hi = params.support
    k = max(k, lo)
    if k > hi:
        return 0.0
    logs = [hg_logpmf_float(params, j) for j in range(k, hi + 1)]
    m = max(logs)
    return math.exp(m) * math.fsum(math.exp(v - m) for v in logs)


# --- Bernoulli decomposition ------------------------------------------------

def _eval_scaled(coeffs: tuple[int, ...], x: Fraction) -> int:
    """Sign-exact value of sum c_k x^k times den(x)^deg."""
    a, b = x.numerator, x.denominator
    d = len(coeffs) - 1
    acc = coeffs[d]
    bp = 1
    for k in range(d - 1, -1, -1):
        bp *= b
        acc = acc * a + coeffs[k] * bp
    return acc


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _eval_float(coeffs: tuple[int, ...], x: float) -> float:
    """Polynomial value at a float point, computed exactly then rounded."""
    q = Fraction(x)
    acc = _eval_scaled(coeffs, q)
    den = q.denominator ** (len(coeffs) - 1)
    try:
        return acc / den
    except OverflowError:
        return math.copysign(math.inf, acc)


def _float_roots_real(coeffs: tuple[int, ...]) -> list[float]:
    """Approximate roots of a real-rooted polynomial with all roots negative.

    Newton iteration with implicit (Maehly) deflation, started right of the
    largest remaining root. Values are evaluated exactly, so the iteration is
    insensitive to the conditioning of the monomial basis.
    """
    d = len(coeffs) - 1
    deriv = tuple(k * coeffs[k] for k in range(1, d + 1))
    found: list[float] = []
    for _ in range(d):
        x = 0.0 if not found else found[-1] - 1e-7 * max(1.0, abs(found[-1]))
        for _it in range(500):
            p = _eval_float(coeffs, x)
            dp = _eval_float(deriv, x)
            denom = dp - p * sum(1.0 / (x - r) for r in found)
            if denom == 0 or not math.isfinite(denom) or not math.isfinite(p):
                break
            step = p / denom
            x_new = x - step
            if abs(step) <= 4e-16 * max(1.0, abs(x_new)) or x_new == x:
                x = x_new
                break
            x = x_new
        found.append(x)
    return sorted(found, reverse=True)


def cauchy_root_bound(coeffs: tuple[int, ...]) -> Fraction:
    lead = coeffs[-1]
    return 1 + max(Fraction(abs(c), abs(lead)) for c in coeffs[:-1])


def _isolate(coeffs: tuple[int, ...]) -> list[tuple[Fraction, Fraction]]:
    """Disjoint brackets each holding a sign change of the polynomial.

    With degree d and d such brackets, every root is isolated.
    """
    d = len(coeffs) - 1
    bound = cauchy_root_bound(coeffs)
    approx = _float_roots_real(coeffs)
    brackets: list[tuple[Fraction, Fraction]] = []
    for i, r in enumerate(approx):
        upper_lim = Fraction(0) if i == 0 else (Fraction(approx[i - 1]) + Fraction(r)) / 2
        lower_lim = -bound if i == d - 1 else (Fraction(approx[i + 1]) + Fraction(r)) / 2
        rq = Fraction(r)
        eps = Fraction(max(abs(r), 1.0)) * Fraction(1, 2**44)
        while True:
            lo = max(rq - eps, lower_lim)
            hi = min(rq + eps, upper_lim)
            if _sign(_eval_scaled(coeffs, lo)) * _sign(_eval_scaled(coeffs, hi)) < 0:
                break
            if lo == lower_lim and hi == upper_lim:
                raise NumericError("root isolation failed")
            eps *= 16
        brackets.append((lo, hi))
    return brackets


def _bisect(coeffs, lo: Fraction, hi: Fraction, width: Fraction) -> Fraction:
    s_lo = _sign(_eval_scaled(coeffs, lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = _sign(_eval_scaled(coeffs, mid))
        if s_mid == 0:
            return mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def bernoulli_decomposition(params: HGParams) -> list[float]:
    """Success probabilities pi_1 >= ... >= pi_n of independent Bernoullis
    whose sum has the same law as the hypergeometric count.

    The probability generating function factors as prod(1 - pi + pi z); its
    roots z_i < 0 are isolated exactly and pi_i = 1/(1 - z_i).
    """
    n, D, N = params.n, params.D, params.N
    if not 1 <= n <= min(D, N - D):
        raise DomainError(f"need 1 <= n <= min(D, N-D), got n={n}, D={D}, N={N}")
    if n > 30:
        raise UsageError("decomposition is limited to n <= 30")
    kmin, coeffs, _ = hg_weights(n, D, N)
    assert kmin == 0 and len(coeffs) == n + 1
    width = Fraction(1, 10**14)
    pis = []
    for lo, hi in _isolate(coeffs):
        z = _bisect(coeffs, lo, hi, width)
        pis.append(float(1 / (1 - z)))
    return sorted(pis, reverse=True)
