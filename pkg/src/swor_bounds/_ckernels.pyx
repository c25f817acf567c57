# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numeric hot loops in ``_pykernels``."""
from libc.math cimport exp, log1p, sqrt, pow, fabs, INFINITY, M_PI

BACKEND = "cython"

GAUSS = 0
HUSH_SCOVEL = 1
BERNSTEIN = 2
BENNETT = 3
SUBMAJOR = 4
LEON_PERRON = 5
LP_HYPER = 6
TALAGRAND_POINT = 7
TALAGRAND_TAIL = 8

cdef double INV_SQRT_2PI = 1.0 / sqrt(2.0 * M_PI)


cpdef double psi(double v):
    cdef double total, term
    cdef int k
    if fabs(v) < 1e-3:
        total = 0.0
        term = 1.0
        for k in range(12):
            total += 2.0 * term / ((k + 1) * (k + 2))
            term *= -v
        return total
    return 2.0 * ((1.0 + v) * log1p(v) - v) / (v * v)


cdef inline double _bennett(double lam, double v, double s, double sqrt_n):
    cdef double x
    if lam == 0.0:
        return 1.0
    x = lam / (sqrt_n * s)
    if x <= -1.0:
        return INFINITY
    return exp(-lam * lam / (2.0 * v) * psi(x))


cdef inline double _talagrand_core(double lam, double n, double r):
    cdef double q = r / (1.0 - r)
    cdef double cube = q * q * q
    return exp(-2.0 * lam * lam / (1.0 - r)) * exp(-(0.25 + cube / 3.0) * lam * lam * lam * lam / n)


cdef double _formula(int code, double lam, double p0, double p1, double p2, double p3):
    cdef double sqrt_n, rest, ratio, cube, quad, denom, base, t, slope, q
    if code == GAUSS:
        return exp(-p0 * lam * lam)
    if code == HUSH_SCOVEL:
        return exp(-2.0 * p1 * (p0 * lam * lam - 1.0))
    if code == BERNSTEIN:
        if lam == 0.0:
            return 1.0
        denom = p0 + p1 * lam / p2
        if denom <= 0.0:
            return INFINITY
        return exp(-0.5 * lam * lam / denom)
    if code == BENNETT:
        return _bennett(lam, p0, p1, p2)
    if code == SUBMAJOR:
        base = 1.0 + lam / (p2 * p1)
        if base <= 0.0:
            return INFINITY
        return pow(base, p3) * _bennett(lam, p0, p1, p2)
    if code == LEON_PERRON:
        sqrt_n = sqrt(p0)
        if lam <= 0.0 or 2.0 * lam >= sqrt_n:
            return INFINITY
        ratio = (sqrt_n + 2.0 * lam) / (sqrt_n - 2.0 * lam)
        return INV_SQRT_2PI / lam * 0.5 * sqrt(ratio) * exp(-2.0 * lam * lam)
    if code == LP_HYPER:
        sqrt_n = sqrt(p0)
        rest = p1 - p0
        if lam <= 0.0 or 2.0 * lam >= sqrt_n or rest - 2.0 * sqrt_n * lam <= 0.0:
            return INFINITY
        ratio = ((rest / p1)
                 * ((sqrt_n + 2.0 * lam) / (sqrt_n - 2.0 * lam))
                 * ((rest + 2.0 * sqrt_n * lam) / (rest - 2.0 * sqrt_n * lam)))
        q = p0 / rest
        cube = q * q * q
        quad = (1.0 + cube) * lam * lam * lam * lam / (3.0 * p0)
        return (INV_SQRT_2PI / lam * 0.5 * sqrt(ratio)
                * exp(-2.0 * lam * lam / (1.0 - p0 / p1))
                * exp(-quad))
    if code == TALAGRAND_POINT:
        return p2 / sqrt(p0) * _talagrand_core(lam, p0, p1)
    if code == TALAGRAND_TAIL:
        if lam <= 0.0:
            return INFINITY
        t = p0
        if t < 0.0:
            t = lam
        q = p2 / (1.0 - p2)
        slope = 4.0 / (1.0 - p2) + 1.0 + 4.0 * q * q * q / 3.0
        return p3 / lam * _talagrand_core(lam, p1, p2) * exp(lam * (lam - t) * slope)
    raise ValueError("unknown formula code %d" % code)


def formula(int code, double lam, double p0=0.0, double p1=0.0, double p2=0.0, double p3=0.0):
    """Evaluate one formula family at a single lambda."""
    return _formula(code, lam, p0, p1, p2, p3)


def formula_grid(int code, double[:] lams, double[:] out,
                 double p0=0.0, double p1=0.0, double p2=0.0, double p3=0.0):
    """Fill ``out[i]`` with the formula at ``lams[i]``."""
    cdef Py_ssize_t i
    for i in range(lams.shape[0]):
        out[i] = _formula(code, lams[i], p0, p1, p2, p3)
    return out


cpdef double technical_gap(double mu, double u, double gamma):
    cdef double m = mu, g = gamma, q, den
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


def technical_min_gap(int n, int N, int steps):
    cdef double mu_lo = (n + 1.0) / N
    cdef double g_lo = (N - n) / <double>n
    cdef double g_hi = N - 1.0
    cdef double best = INFINITY, bmu = 0.0, bu = 0.0, bg = 0.0
    cdef double mu, u, gamma, g
    cdef int i, j, k
    for i in range(steps):
        mu = mu_lo + (0.5 - mu_lo) * i / (steps - 1) if steps > 1 else mu_lo
        for j in range(1, steps + 1):
            u = 0.5 * j / (steps + 1)
            for k in range(steps):
                gamma = g_lo * pow(g_hi / g_lo, k / <double>(steps - 1)) if steps > 1 else g_lo
                g = technical_gap(mu, u, gamma)
                if g < best:
                    best = g
                    bmu = mu
                    bu = u
                    bg = gamma
    return (best, bmu, bu, bg)


def subset_phi_means(values, int n, rates, knots):
    cdef Py_ssize_t N = len(values)
    cdef Py_ssize_t nr = len(rates), nk = len(knots)
    cdef double[:] x = memoryview_of(values)
    cdef double[:] rr = memoryview_of(rates)
    cdef double[:] cc = memoryview_of(knots)
    cdef double[:] exp_acc = memoryview_of([0.0] * nr)
    cdef double[:] hinge_acc = memoryview_of([0.0] * nk)
    cdef double sq_acc = 0.0, s
    cdef long count = 0
    cdef Py_ssize_t i, j
    cdef long[:] ix
    if n > N or n < 0:
        raise ValueError("subset size out of range")
    import array
    ix = array.array("l", range(n))
    while True:
        s = 0.0
        for j in range(n):
            s += x[ix[j]]
        for j in range(nr):
            exp_acc[j] += exp(rr[j] * s)
        for j in range(nk):
            if s > cc[j]:
                hinge_acc[j] += s - cc[j]
        sq_acc += s * s
        count += 1
        # next combination in lexicographic order
        i = n - 1
        while i >= 0 and ix[i] == i + N - n:
            i -= 1
        if i < 0:
            break
        ix[i] += 1
        for j in range(i + 1, n):
            ix[j] = ix[j - 1] + 1
    return ([exp_acc[j] / count for j in range(nr)],
            [hinge_acc[j] / count for j in range(nk)],
            sq_acc / count)


cdef double[:] memoryview_of(seq):
    import array
    return array.array("d", [float(v) for v in seq])
