import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from swor_bounds.core_types import DomainError, Population, UsageError
from swor_bounds.majorization import (
    chernoff_submajor,
    convex_order_float,
    kemperman_majorize,
    prec,
    prec_w,
    sub_majorize,
    verify_convex_order,
)
from swor_bounds.registry import BoundId, PopInput, evaluate

unit_fracs = st.lists(
    st.tuples(st.integers(0, 8), st.integers(1, 8)).map(lambda t: Fraction(min(t), t[1])),
    min_size=2, max_size=9,
)


def test_prec_examples():
    x = Population([1, 1, 1])
    y = Population([3, 0, 0])
    assert prec(x, y) and not prec(y, x)
    assert prec_w(Population([1, 1, 0]), Population([2, 1, 0]))
    assert not prec(Population([1, 1, 0]), Population([2, 1, 0]))


def test_kemperman_pass_is_order_sensitive():
    res = kemperman_majorize(Population([Fraction(1, 2), Fraction(1, 2), 0]))
    assert res.output.values == (0, 0, 1)
    assert res.exceptional is None and res.D_major == 1


def test_rejects_values_outside_unit_interval():
    with pytest.raises(DomainError):
        kemperman_majorize(Population([0, 2]))


@given(unit_fracs)
def test_majorizer_structure(vals):
    x = Population(vals)
    res = kemperman_majorize(x)
    assert prec(x, res.output)
    assert sum(res.output.values) == sum(x.values)
    assert res.ones == res.D_major
    assert res.alpha == sum(x.values) - res.D_major
    assert res.ones + res.zeros >= x.N - 1
    sub = sub_majorize(x)
    assert set(sub.values) <= {0, 1}
    assert prec_w(x, sub)


@given(unit_fracs, st.data())
def test_convex_order_holds(vals, data):
    x = Population(vals)
    n = data.draw(st.integers(1, x.N))
    assert verify_convex_order(x, kemperman_majorize(x).output, n, "convex").ok
    assert verify_convex_order(x, sub_majorize(x), n, "increasing").ok


def test_convex_order_detects_reversed_pair():
    x = Population([0, 0, 1, 1])
    y = Population([Fraction(1, 2)] * 4)
    rep = verify_convex_order(x, y, 2, "convex")
    assert not rep.ok and rep.worst_margin < 0


def test_convex_order_limits():
    with pytest.raises(UsageError):
        verify_convex_order(Population([0] * 17), Population([0] * 17), 2)
    with pytest.raises(UsageError):
        verify_convex_order(Population([0, 1]), Population([0, 1, 0]), 1)


def test_float_enumeration_ignores_order():
    rng = random.Random(3)
    vals = [rng.random() for _ in range(9)]
    a = convex_order_float(vals, 4)
    b = convex_order_float(sorted(vals), 4)
    exps, hinges, square = a
    assert exps == pytest.approx(b[0], rel=1e-12)
    assert hinges == pytest.approx(b[1], rel=1e-12, abs=1e-15)
    assert square == pytest.approx(b[2], rel=1e-12)


def test_chernoff_r2_matches_registry_closed_form():
    pop = Population([Fraction(i % 7, 30) for i in range(60)])
    lam = 0.05
    closed = evaluate(BoundId.kemperman_submajor, PopInput(pop, 5), lam)
    r2 = chernoff_submajor(pop, 5, lam, "r2")
    assert r2.raw == pytest.approx(closed.raw, rel=1e-12)
    assert chernoff_submajor(pop, 5, lam).raw <= r2.raw * (1 + 1e-12)
