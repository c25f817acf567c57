"""Numerical forms of the analytic ingredients behind the bounds.

Each function here is checked against exact pmfs or high-accuracy
quadrature by the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core_types import DomainError, HGParams
from .kernels import backend
from .oracle import hg_weights


def stirling_envelope(n: int) -> tuple[float, float]:
    """Robbins' two-sided bracket of n!.

    sqrt(2 pi n) (n/e)^n exp(1/(12n+1)) <= n! <= sqrt(2 pi n) (n/e)^n exp(1/(12n)).
    """
    if n < 1:
        raise DomainError("stirling_envelope needs n >= 1")
    base = math.sqrt(2.0 * math.pi * n) * (n / math.e) ** n
    return base * math.exp(1.0 / (12 * n + 1)), base * math.exp(1.0 / (12 * n))


def h_bennett(v: float) -> float:
    """h(v) = v (log v - 1) + 1 for v > 0, extended by h(0) = 1."""
    if v < 0:
        raise DomainError("h is defined for v >= 0")
    if v == 0:
        return 1.0
    return v * (math.log(v) - 1.0) + 1.0


def psi_bennett(v: float) -> float:
    """psi(v) = 2 h(1+v) / v**2 with psi(0) = 1; a series is used near 0."""
    if v < 0:
        raise DomainError("psi is evaluated on v >= 0")
    return backend.psi(v)


def big_psi(u: float, mu: float) -> float:
    """Relative entropy of Bernoulli(mu + u) from Bernoulli(mu)."""
    if not 0 < mu < 1:
        raise DomainError("need 0 < mu < 1")
    if not 0 <= u < 1 - mu:
        raise DomainError("need 0 <= u < 1 - mu")
    x = u + mu
    return x * math.log(x / mu) + (1 - x) * math.log((1 - x) / (1 - mu))


def big_psi_second_derivative(u: float, mu: float) -> float:
    """Closed form 4 / (1 - 4 (u - (1/2 - mu))**2)."""
    d = u - (0.5 - mu)
    return 4.0 / (1.0 - 4.0 * d * d)


def pmf_deviate_bound(params: HGParams, k: int) -> float:
    """Upper bound on P(S = k) for counts at or above the mean.

    Requires 1 <= n < D <= floor(N/2), 1 <= k <= n-1 and k >= nD/N.
    """
    n, D, N = params.n, params.D, params.N
    if not (1 <= n < D <= N // 2):
        raise DomainError("need 1 <= n < D <= floor(N/2)")
    if not (1 <= k <= n - 1) or k * N < n * D:
        raise DomainError("need 1 <= k <= n-1 and k >= nD/N")
    prefactor = math.sqrt(
        (D * (N - D) * n * (N - n))
        / (k * (D - k) * (n - k) * (N - D - n + k) * N)
    ) / math.sqrt(2.0 * math.pi)
    u = k / n - D / N
    rest = N - n
    return (
        prefactor
        * math.exp(-2.0 * n * N / rest * u * u)
        * math.exp(-(n / 3.0) * (1.0 + (n / rest) ** 3) * u ** 4)
    )


def tail_ratio_multiplier(params: HGParams, k: int) -> Fraction:
    """Exact factor k (N-D-n+k) / (N k - n D) with P(S>=k) <= factor * P(S=k)."""
    n, D, N = params.n, params.D, params.N
    if N <= 4 or D < 1 or D > N - 1:
        raise DomainError("need N > 4 and 1 <= D <= N-1")
    if k * N <= n * D:
        raise DomainError("need k > nD/N")
    lo, hi = params.support
    if not lo <= k <= hi:
        raise DomainError("k outside the support")
    return Fraction(k * (N - D - n + k), N * k - n * D)


def tail_ratio_bound(params: HGParams, k: int) -> float:
    """P(S=k) k (N-D-n+k) / (N k - n D), an upper bound on P(S >= k)."""
    mult = tail_ratio_multiplier(params, k)
    kmin, w, total = hg_weights(params.n, params.D, params.N)
    value = Fraction(w[k - kmin], total) * mult
    return value.numerator / value.denominator


def technical_lemma_gap(mu: float, u: float, gamma: float, n: int, N: int) -> float:
    """Gap between the mu = 1/2 value of the Leon-Perron prefactor function
    and its value at (mu, u, gamma); nonnegative on the box.

    The box is mu in [(n+1)/N, 1/2], u in (0, 1/2) and gamma >= (N-n)/n > 1.
    Larger gamma corresponds to a smaller sample on the same population.
    """
    gamma_n = (N - n) / n
    if gamma <= 1 or gamma < gamma_n:
        raise DomainError("need gamma > 1 and gamma >= (N-n)/n")
    if not (n + 1) / N <= mu <= 0.5:
        raise DomainError("need (n+1)/N <= mu <= 1/2")
    if not 0 < u < 0.5:
        raise DomainError("need 0 < u < 1/2")
    return backend.technical_gap(mu, u, gamma)


def technical_lemma_min_gap(n: int, N: int, steps: int = 50) -> tuple[float, float, float, float]:
    """Minimum gap over a steps**3 grid of the box for (n, N).

    Returns ``(gap, mu, u, gamma)`` at the minimiser.
    """
    if not (1 <= n and 2 * (n + 1) <= N):
        raise DomainError("box is empty: need (n+1)/N <= 1/2")
    return tuple(backend.technical_min_gap(n, N, steps))


@dataclass(frozen=True)
class TalagrandConstants:
    mu0: float
    psi0: float
    K_c1: float
    K_c2: float
    K_c3: float
    K1: float
    v0: float
    K_ab: float
    K2: float


def talagrand_constants(mu0: float, psi0: float) -> TalagrandConstants:
    """Explicit constants for the point and tail bounds of Talagrand type.

    ``mu0`` bounds D/N away from 0 and 1, ``psi0`` does the same for n/N.
    """
    if not (0 < mu0 <= 0.5 and 0 < psi0 <= 0.5):
        raise DomainError("need 0 < mu0 <= 1/2 and 0 < psi0 <= 1/2")
    two_pi = 2.0 * math.pi
    k_c1 = math.sqrt(1 - psi0) / (psi0 * math.sqrt(two_pi * mu0 ** 4))
    k_c2 = math.sqrt(0.25 * (1 - psi0) / (two_pi * psi0 ** 2 * (1 - mu0 / 2) ** 2)) * (
        192.0 / (mu0 ** 4 * math.e)
    )
    k_c3 = math.sqrt((1 - mu0) * (1 - psi0) / psi0) * (5.0 / (mu0 ** 5 * math.e))
    k1 = max(k_c1, k_c2, k_c3)
    v0 = 4.0 / psi0 + (4.0 / 3.0) * (1 - psi0) ** 2 / psi0 ** 3
    k_ab = v0 / (1.0 - math.exp(-v0))
    return TalagrandConstants(mu0, psi0, k_c1, k_c2, k_c3, k1, v0, k_ab, k1 * k_ab / 2.0)
