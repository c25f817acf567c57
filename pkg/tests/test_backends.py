import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swor_bounds import kernels
from swor_bounds.registry import BoundId, evaluate_grid, input_for

py = kernels.python_backend
cy = kernels.compiled_backend
needs_compiled = pytest.mark.skipif(cy is None, reason="compiled extension not built")

# (code, parameter tuple) samples valid for each formula family
CASES = [
    (py.GAUSS, (2.5,)),
    (py.HUSH_SCOVEL, (40.0, 0.3)),
    (py.BERNSTEIN, (0.2, 0.5, 6.0)),
    (py.BENNETT, (0.2, 0.8, 6.0)),
    (py.SUBMAJOR, (0.15, 1.0, 6.0, 1.0)),
    (py.LEON_PERRON, (36.0,)),
    (py.LP_HYPER, (36.0, 400.0)),
    (py.TALAGRAND_POINT, (36.0, 0.3, 2.0)),
    (py.TALAGRAND_TAIL, (0.1, 36.0, 0.3, 2.0)),
]


@needs_compiled
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "cython"
    for name in ("GAUSS", "BENNETT", "TALAGRAND_TAIL"):
        assert getattr(cy, name) == getattr(py, name)


@needs_compiled
@pytest.mark.parametrize("code,args", CASES)
def test_formula_parity(code, args):
    lams = np.linspace(0.01, 2.9, 101)
    a, b = np.empty_like(lams), np.empty_like(lams)
    py.formula_grid(code, lams, a, *args)
    cy.formula_grid(code, lams, b, *args)
    np.testing.assert_allclose(a, b, rtol=1e-12)
    assert cy.formula(code, 0.7, *args) == pytest.approx(py.formula(code, 0.7, *args), rel=1e-12)


@needs_compiled
@given(st.floats(0, 1e5))
def test_psi_parity(v):
    assert cy.psi(v) == pytest.approx(py.psi(v), rel=1e-12)


@needs_compiled
def test_technical_and_enumeration_parity():
    assert cy.technical_min_gap(10, 50, 12) == pytest.approx(py.technical_min_gap(10, 50, 12), rel=1e-12, abs=1e-15)
    vals = [0.1, 0.9, 0.4, 0.0, 1.0, 0.25, 0.6]
    a = cy.subset_phi_means(vals, 3, [0.5, 2.0], [0.5, 1.0, 2.0])
    b = py.subset_phi_means(vals, 3, [0.5, 2.0], [0.5, 1.0, 2.0])
    for x, y in zip(a, b):
        assert x == pytest.approx(y, rel=1e-12, abs=1e-15)


def test_pure_backend_forced_by_environment():
    env = dict(os.environ, SWOR_BOUNDS_PURE="1")
    res = subprocess.run([sys.executable, "-c", "import swor_bounds; print(swor_bounds.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert res.stdout.strip() == "python"


@pytest.mark.parametrize("bound", [BoundId.lp_hyper, BoundId.bennett_hyper, BoundId.hush_scovel])
def test_registry_grid_finite(bound):
    raw, ok, _ = evaluate_grid(bound, input_for(bound, 20, 60, 200), np.linspace(0.05, 2, 40))
    assert np.all(np.isfinite(raw[ok]))
