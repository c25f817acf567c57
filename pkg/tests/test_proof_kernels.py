import math

import pytest
from hypothesis import given, strategies as st

from swor_bounds.core_types import DomainError, HGParams
from swor_bounds.oracle import hg_pmf, hg_tail
from swor_bounds.proof_kernels import (
    big_psi,
    big_psi_second_derivative,
    h_bennett,
    pmf_deviate_bound,
    psi_bennett,
    stirling_envelope,
    tail_ratio_bound,
    talagrand_constants,
    technical_lemma_gap,
    technical_lemma_min_gap,
)


def test_stirling_envelope_frozen_and_brackets():
    lo, hi = stirling_envelope(1)
    assert lo == pytest.approx(0.99587016146279725, rel=1e-14)
    assert hi == pytest.approx(1.00227444918222666, rel=1e-14)
    for n in range(1, 26):
        lo, hi = stirling_envelope(n)
        assert lo <= math.factorial(n) <= hi


def test_big_psi_frozen_value():
    assert big_psi(0.2, 0.5) == pytest.approx(0.08228287850505185, rel=1e-14)
    with pytest.raises(DomainError):
        big_psi(0.6, 0.5)


@given(st.floats(0.01, 0.99), st.floats(0.0, 1.0))
def test_big_psi_second_derivative_matches_finite_difference(mu, frac):
    u = frac * (1 - mu) * 0.8 + 0.1 * (1 - mu)
    h = 1e-4 * (1 - mu)
    fd = (big_psi(u + h, mu) - 2 * big_psi(u, mu) + big_psi(u - h, mu)) / (h * h)
    exact = 1 / (u + mu) + 1 / (1 - u - mu)
    assert fd == pytest.approx(exact, rel=1e-4)
    assert big_psi_second_derivative(u, mu) == pytest.approx(exact, rel=1e-9)


@given(st.floats(0, 1e4))
def test_psi_above_bernstein_floor(v):
    assert psi_bennett(v) >= 1 / (1 + v / 3) - 1e-15


def test_psi_and_h_known_points():
    assert psi_bennett(0.0) == 1.0
    assert h_bennett(1.0) == 0.0
    v = 2.0
    assert psi_bennett(v) == pytest.approx(2 * h_bennett(1 + v) / v ** 2, rel=1e-14)


@st.composite
def hg_point(draw):
    N = draw(st.integers(2, 60))
    D = draw(st.integers(1, N - 1))
    n = draw(st.integers(1, N - 1))
    p = HGParams(n, D, N)
    lo, hi = p.support
    k = draw(st.integers(lo, hi))
    return p, k


@given(hg_point())
def test_pmf_and_tail_kernels_dominate(case):
    p, k = case
    if k * p.N <= p.n * p.D:
        return
    try:
        b = pmf_deviate_bound(p, k)
    except DomainError:
        b = None
    if b is not None:
        assert b >= hg_pmf(p, k).float_shadow * (1 - 1e-12)
    try:
        t = tail_ratio_bound(p, k)
    except DomainError:
        return
    assert t >= hg_tail(p, k).float_shadow * (1 - 1e-12)


def test_technical_gap_grid_nonnegative():
    for n, N in ((5, 20), (10, 50)):
        gap, *_ = technical_lemma_min_gap(n, N, 20)
        assert gap >= -1e-12


def test_technical_gap_zero_at_half():
    assert technical_lemma_gap(0.5, 0.2, 3.0, 10, 40) == pytest.approx(0.0, abs=1e-15)


def test_talagrand_constants_v0():
    c = talagrand_constants(0.5, 0.5)
    assert c.v0 == pytest.approx(8 + 8 / 3, rel=1e-15)
    assert c.K1 == max(c.K_c1, c.K_c2, c.K_c3)
    with pytest.raises(DomainError):
        talagrand_constants(0.6, 0.5)
