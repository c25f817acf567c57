"""Pure-Python implementations of the numeric hot loops.

Mirrors ``_ckernels.pyx`` function for function; selected when the compiled
module is missing or SWOR_BOUNDS_PURE is set.
"""
import math
from itertools import combinations

BACKEND = "python"

# formula family codes shared with the compiled module
GAUSS = 0
HUSH_SCOVEL = 1
BERNSTEIN = 2
BENNETT = 3
SUBMAJOR = 4
LEON_PERRON = 5
LP_HYPER = 6
TALAGRAND_POINT = 7
TALAGRAND_TAIL = 8

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def psi(v):
    """Bennett's psi(v) = 2 h(1+v) / v**2 for v > -1, with psi(0) = 1."""
    if abs(v) < 1e-3:
        # alternating series sum_k 2 (-v)^k / ((k+1)(k+2))
        total = 0.0
        term = 1.0
        for k in range(12):
            total += 2.0 * term / ((k + 1) * (k + 2))
            term *= -v
        return total
    return 2.0 * ((1.0 + v) * math.log1p(v) - v) / (v * v)


def _gauss(lam, coef):
    return math.exp(-coef * lam * lam)


def _hush_scovel(lam, n, alpha):
    return math.exp(-2.0 * alpha * (n * lam * lam - 1.0))


def _bernstein(lam, v, w, sqrt_n):
    if lam == 0.0:
        return 1.0
    denom = v + w * lam / sqrt_n
    if denom <= 0.0:
        return math.inf
    return math.exp(-0.5 * lam * lam / denom)


def _bennett(lam, v, s, sqrt_n):
    if lam == 0.0:
        return 1.0
    x = lam / (sqrt_n * s)
    if x <= -1.0:
        return math.inf
    return math.exp(-lam * lam / (2.0 * v) * psi(x))


def _submajor(lam, v, s, sqrt_n, expo):
    base = 1.0 + lam / (sqrt_n * s)
    if base <= 0.0:
        return math.inf
    return base ** expo * _bennett(lam, v, s, sqrt_n)


def _leon_perron(lam, n):
    sqrt_n = math.sqrt(n)
    if lam <= 0.0 or 2.0 * lam >= sqrt_n:
        return math.inf
    ratio = (sqrt_n + 2.0 * lam) / (sqrt_n - 2.0 * lam)
    return _INV_SQRT_2PI / lam * 0.5 * math.sqrt(ratio) * math.exp(-2.0 * lam * lam)


def _lp_hyper(lam, n, N):
    sqrt_n = math.sqrt(n)
    rest = N - n
    if lam <= 0.0 or 2.0 * lam >= sqrt_n or rest - 2.0 * sqrt_n * lam <= 0.0:
        return math.inf
    ratio = (
        (rest / N)
        * ((sqrt_n + 2.0 * lam) / (sqrt_n - 2.0 * lam))
        * ((rest + 2.0 * sqrt_n * lam) / (rest - 2.0 * sqrt_n * lam))
    )
    cube = (n / rest) ** 3
    quad = (1.0 + cube) * lam ** 4 / (3.0 * n)
    return (
        _INV_SQRT_2PI / lam * 0.5 * math.sqrt(ratio)
        * math.exp(-2.0 * lam * lam / (1.0 - n / N))
        * math.exp(-quad)
    )


def _talagrand_core(lam, n, r):
    cube = (r / (1.0 - r)) ** 3
    return math.exp(-2.0 * lam * lam / (1.0 - r)) * math.exp(-(0.25 + cube / 3.0) * lam ** 4 / n)


def _talagrand_point(lam, n, r, K):
    return K / math.sqrt(n) * _talagrand_core(lam, n, r)


def _talagrand_tail(lam, t, n, r, K):
    if lam <= 0.0:
        return math.inf
    if t < 0.0:
        t = lam
    slope = 4.0 / (1.0 - r) + 1.0 + 4.0 * (r / (1.0 - r)) ** 3 / 3.0
    return K / lam * _talagrand_core(lam, n, r) * math.exp(lam * (lam - t) * slope)


def formula(code, lam, p0=0.0, p1=0.0, p2=0.0, p3=0.0):
    """Evaluate one formula family at a single lambda."""
    if code == GAUSS:
        return _gauss(lam, p0)
    if code == HUSH_SCOVEL:
        return _hush_scovel(lam, p0, p1)
    if code == BERNSTEIN:
        return _bernstein(lam, p0, p1, p2)
    if code == BENNETT:
        return _bennett(lam, p0, p1, p2)
    if code == SUBMAJOR:
        return _submajor(lam, p0, p1, p2, p3)
    if code == LEON_PERRON:
        return _leon_perron(lam, p0)
    if code == LP_HYPER:
        return _lp_hyper(lam, p0, p1)
    if code == TALAGRAND_POINT:
        return _talagrand_point(lam, p0, p1, p2)
    if code == TALAGRAND_TAIL:
        return _talagrand_tail(lam, p0, p1, p2, p3)
    raise ValueError(f"unknown formula code {code}")


def formula_grid(code, lams, out, p0=0.0, p1=0.0, p2=0.0, p3=0.0):
    """Fill ``out[i]`` with the formula at ``lams[i]``."""
    for i in range(len(lams)):
        out[i] = formula(code, float(lams[i]), p0, p1, p2, p3)
    return out


def technical_gap(mu, u, gamma):
    """RHS minus LHS of the technical lemma, in a factored form.

    The numerator carries an explicit (2 mu - 1) factor, so the gap is
    exactly zero at mu = 1/2 instead of a cancellation residue.
    """
    m, g = mu, gamma
    q = (
        4*g*g*m*m*m*u - 2*g*g*m*m*m + 4*g*g*m*m*u*u - 8*g*g*m*m*u
        + 3*g*g*m*m - 6*g*g*m*u*u + 3*g*g*m*u - g*g*m - 8*g*m*m*m*u*u
        + 4*g*m*m*m*u - 8*g*m*m*u*u*u + 12*g*m*m*u*u - 4*g*m*m*u
        + 8*g*m*u*u*u - 6*g*m*u*u - g*m*u - 2*g*u*u*u + g*u*u + g*u
        + 8*m*m*u*u*u - 4*m*m*u*u + 8*m*u*u*u*u - 8*m*u*u*u + 2*m*u*u
        - 4*u*u*u*u + 2*u*u*u + 2*u*u
    )
    den = 4.0 * (2.0 * u - g) * (2.0 * u - 1.0) * (u - g * m) * (m + u - 1.0)
    return (2.0 * m - 1.0) * q / den


def technical_min_gap(n, N, steps):
    """Minimum of ``technical_gap`` over a steps**3 grid.

    mu runs over [(n+1)/N, 1/2], u over the interior of (0, 1/2) and gamma
    geometrically over [(N-n)/n, N-1]. Returns (gap, mu, u, gamma).
    """
    mu_lo = (n + 1.0) / N
    g_lo = (N - n) / n
    g_hi = N - 1.0
    best = (math.inf, 0.0, 0.0, 0.0)
    for i in range(steps):
        mu = mu_lo + (0.5 - mu_lo) * i / (steps - 1) if steps > 1 else mu_lo
        for j in range(1, steps + 1):
            u = 0.5 * j / (steps + 1)
            for k in range(steps):
                gamma = g_lo * (g_hi / g_lo) ** (k / (steps - 1)) if steps > 1 else g_lo
                g = technical_gap(mu, u, gamma)
                if g < best[0]:
                    best = (g, mu, u, gamma)
    return best


def subset_phi_means(values, n, rates, knots):
    """Averages over all n-subsets of exp(r*s), max(s-c, 0) and s**2.

    Returns (list per rate, list per knot, mean of squares).
    """
    exp_acc = [0.0] * len(rates)
    hinge_acc = [0.0] * len(knots)
    sq_acc = 0.0
    count = 0
    for combo in combinations(values, n):
        s = 0.0
        for x in combo:
            s += x
        for i, r in enumerate(rates):
            exp_acc[i] += math.exp(r * s)
        for i, c in enumerate(knots):
            if s > c:
                hinge_acc[i] += s - c
        sq_acc += s * s
        count += 1
    return (
        [a / count for a in exp_acc],
        [a / count for a in hinge_acc],
        sq_acc / count,
    )
