import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from swor_bounds.core_types import DomainError, HGParams
from swor_bounds.oracle import (
    bernoulli_decomposition,
    binom_pmf,
    binom_tail,
    ehm_tv_bound,
    ehm_tv_bound_exact,
    hg_pmf,
    hg_pmf_vector,
    hg_tail,
    hg_tail_float,
    tv_distance,
)


def _enumerated_pmf(n, D, N):
    """Count successes over every n-subset of a 0/1 population."""
    pop = [1] * D + [0] * (N - D)
    counts = {}
    for sub in itertools.combinations(range(N), n):
        k = sum(pop[i] for i in sub)
        counts[k] = counts.get(k, 0) + 1
    total = math.comb(N, n)
    return {k: Fraction(c, total) for k, c in counts.items()}


@st.composite
def small_hg(draw, max_N=12):
    N = draw(st.integers(1, max_N))
    D = draw(st.integers(0, N))
    n = draw(st.integers(1, N))
    return n, D, N


@given(small_hg())
def test_pmf_matches_subset_enumeration(case):
    n, D, N = case
    ref = _enumerated_pmf(n, D, N)
    p = HGParams(n, D, N)
    lo, hi = p.support
    for k in range(lo, hi + 1):
        assert hg_pmf(p, k).value == ref.get(k, 0)
    assert sum(hg_pmf_vector(p)) == 1


@given(small_hg())
def test_tail_matches_enumeration_and_float_shadow(case):
    n, D, N = case
    ref = _enumerated_pmf(n, D, N)
    p = HGParams(n, D, N)
    lo, hi = p.support
    for k in range(lo, hi + 1):
        exact = sum(v for j, v in ref.items() if j >= k)
        t = hg_tail(p, k)
        assert t.value == exact
        assert hg_tail_float(p, k) == pytest.approx(float(exact), rel=1e-12)


def test_pmf_outside_support_is_zero():
    p = HGParams(2, 3, 8)
    assert hg_pmf(p, 1).value == Fraction(15, 28)
    assert hg_pmf(p, 3).value == 0
    assert hg_tail(p, -4).value == 1


def test_binomial_exact_values():
    assert binom_tail(4, Fraction(1, 4), 3).value == Fraction(13, 256)
    assert binom_pmf(3, Fraction(1, 2), 1).value == Fraction(3, 8)
    with pytest.raises(DomainError):
        binom_pmf(3, Fraction(3, 2), 1)


def test_tv_distance_small_case():
    p = HGParams(2, 2, 4)
    assert tv_distance(p).value == Fraction(1, 6)
    assert ehm_tv_bound_exact(p) == Fraction(1, 6)


@given(small_hg(max_N=25))
def test_tv_distance_below_ehm_bound(case):
    n, D, N = case
    p = HGParams(n, D, N)
    if 0 < D < N:
        assert tv_distance(p).value <= ehm_tv_bound_exact(p)
        assert ehm_tv_bound(p) == pytest.approx(float(ehm_tv_bound_exact(p)))


def test_decomposition_reproduces_pmf():
    p = HGParams(6, 9, 20)
    pis = bernoulli_decomposition(p)
    assert len(pis) == 6 and all(0 <= x <= 1 for x in pis)
    poly = [1.0]
    for q in pis:
        poly = [a * (1 - q) + b * q for a, b in zip(poly + [0.0], [0.0] + poly)]
    for k, v in enumerate(hg_pmf_vector(p)):
        assert poly[k] == pytest.approx(float(v), abs=1e-13)


def test_decomposition_rejects_n_above_min_D():
    with pytest.raises(DomainError):
        bernoulli_decomposition(HGParams(5, 3, 10))


@given(st.integers(2, 60).flatmap(lambda N: st.tuples(st.just(N), st.integers(1, N - 1))))
def test_decomposition_moments_property(case):
    N, D = case
    n = min(D, N - D)
    pis = bernoulli_decomposition(HGParams(n, D, N))
    assert math.fsum(pis) == pytest.approx(n * D / N, abs=1e-10)
    var = n * D * (N - D) * (N - n) / (N * N * (N - 1))
    assert math.fsum(q * (1 - q) for q in pis) == pytest.approx(var, abs=1e-10)
