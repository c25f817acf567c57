import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swor_bounds.core_types import BinParams, HGParams, Population, UsageError, threshold_k0
from swor_bounds.oracle import binom_tail, hg_tail
from swor_bounds.registry import (
    NOT_GUARANTEED,
    BoundId,
    MatrixInput,
    PopInput,
    bm_c_n,
    conjectured_serfling,
    evaluate,
    evaluate_grid,
    input_for,
    serfling_matrix,
    sigma_A2,
    sup_dev_matrix,
)

OPTS = {BoundId.talagrand_hyper_ii: {"t": 0.2}, BoundId.talagrand_bin_iii: {"K2": 1.0}}


def test_serfling_hg_frozen_value():
    # 50-digit mpmath evaluation
    v = evaluate(BoundId.serfling_hg, HGParams(100, 200, 2001), 1.0)
    assert v.raw == pytest.approx(0.1219552693230921986, rel=1e-14)
    assert v.domain_ok


def test_serfling_general_agrees_on_zero_one_population():
    p = HGParams(30, 70, 400)
    pop_val = evaluate(BoundId.serfling_general, input_for(BoundId.serfling_general, 30, 70, 400), 0.7)
    assert pop_val.raw == pytest.approx(evaluate(BoundId.serfling_hg, p, 0.7).raw, rel=1e-14)


@pytest.mark.parametrize("bound", list(BoundId))
def test_grid_matches_pointwise(bound):
    inp = input_for(bound, 10, 20, 50)
    lams = np.linspace(0.05, 1.5, 17)
    raw, ok, _ = evaluate_grid(bound, inp, lams, **OPTS.get(bound, {}))
    for lam, r, o in zip(lams, raw, ok):
        bv = evaluate(bound, inp, lam, **OPTS.get(bound, {}))
        assert r == pytest.approx(bv.raw, rel=1e-13)
        assert bool(o) == bv.domain_ok


def test_pole_bearing_bound_flags_out_of_domain():
    p = HGParams(16, 40, 100)
    assert evaluate(BoundId.lp_hyper, p, 1.9).domain_ok
    bad = evaluate(BoundId.lp_hyper, p, 2.0)
    assert not bad.domain_ok and "lambda" in bad.domain_msg


def test_talagrand_event_level_required():
    with pytest.raises(UsageError):
        evaluate(BoundId.talagrand_hyper_ii, HGParams(10, 20, 50), 0.5)


def test_kemperman_major_needs_integer_total():
    pop = Population([Fraction(1, 3), Fraction(1, 3), 0, 1, 0, 0])
    bv = evaluate(BoundId.kemperman_major, PopInput(pop, 1), 0.5)
    assert not bv.domain_ok


def test_sigma_A2_identity_matrix_and_sup_dev():
    eye = np.eye(2)
    assert sigma_A2(eye) == pytest.approx(1.0, rel=1e-15)
    assert sup_dev_matrix(eye) == pytest.approx(0.5)


def test_gi_matrix_equals_gi_swor_on_sample_sum_matrix():
    pop = Population([0.3, 1.7, -2.0, 4.0, 0.0, 1.1, 2.5])
    a = evaluate(BoundId.gi_matrix, MatrixInput(serfling_matrix(pop, 3), 3), 0.8)
    b = evaluate(BoundId.gi_swor, PopInput(pop, 3), 0.8)
    assert a.raw == pytest.approx(b.raw, rel=1e-12)


def test_bm_constant_positive_and_monotone_in_delta():
    assert 0 < bm_c_n(0.5, 1.0, 50, 1e-3) < bm_c_n(0.5, 1.0, 50, 1e-7)


def test_conjectured_serfling_is_smaller_than_serfling():
    p = HGParams(100, 200, 2001)
    for lam in (0.3, 1.0, 2.0):
        assert conjectured_serfling(p, lam) <= evaluate(BoundId.serfling_hg, p, lam).raw


@st.composite
def hg_case(draw):
    N = draw(st.integers(4, 60))
    D = draw(st.integers(1, N - 1))
    n = draw(st.integers(1, min(D, N - D)))
    lam = draw(st.floats(0.01, 3.0))
    return n, D, N, lam


HG_GUARANTEED = [b for b in BoundId if b not in NOT_GUARANTEED
                 and b not in (BoundId.talagrand_hyper_i, BoundId.talagrand_hyper_ii,
                               BoundId.gi_matrix, BoundId.gi_swor)]
# the point bound talagrand_hyper_i is compared with the pmf in the dominance suite


@given(hg_case(), st.sampled_from(HG_GUARANTEED))
def test_guaranteed_bounds_dominate_exact_tail(case, bound):
    n, D, N, lam = case
    inp = input_for(bound, n, D, N)
    bv = evaluate(bound, inp, lam)
    if not bv.domain_ok:
        return
    if isinstance(inp, BinParams):
        tail = binom_tail(n, Fraction(D, N), threshold_k0(n, Fraction(D, N), lam)).float_shadow
    else:
        tail = hg_tail(HGParams(n, D, N), threshold_k0(n, Fraction(D, N), lam)).float_shadow
    assert bv.raw >= tail - 1e-12
