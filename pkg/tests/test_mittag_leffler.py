import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc, rgamma

from foxkernel import foxh
from foxkernel.mittag_leffler import (SERIES_LIMIT, MLParams, ml_asymptotic, ml_eval, ml_hfox,
                                      ml_series, ml_spec)

from conftest import mp_mittag_leffler, mp_ml_asymptotic


def test_spot_values():
    assert ml_eval(1.0, 1.0, 1.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert ml_eval(1.0, 2.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-14)
    assert ml_eval(0.5, 1.0, 1.0) == pytest.approx(math.e * erfc(1.0), abs=1e-14)
    assert ml_eval(0.5, 1.0, 1.0) == pytest.approx(0.4275835762, abs=1e-10)


@pytest.mark.parametrize("a,b", [(0.3, 1.0), (1.5, -0.5), (0.9, 2.3), (1.0, 0.0)])
def test_zero_argument(a, b):
    assert ml_eval(a, b, 0.0) == pytest.approx(float(rgamma(b)), abs=1e-16)


def test_params_object_and_arrays():
    r = np.array([[0.0, 1.0], [5.0, 50.0]])
    out = ml_eval(MLParams(0.7, 1.2), r)
    assert out.shape == r.shape
    assert out[0, 1] == pytest.approx(ml_eval(0.7, 1.2, 1.0), rel=1e-15)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        MLParams(2.0)
    with pytest.raises(ValueError):
        ml_eval(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ml_eval(0.5, 1.0, -1.0)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.8, 1.0])
def test_complete_monotonicity_range(a):
    v = ml_eval(a, 1.0, np.linspace(0, 100, 100))
    assert np.all(v > 0)
    assert np.all(np.diff(v) < 0)


@pytest.mark.parametrize("a,b", [(0.4, 1.0), (0.75, 0.5), (1.3, 1.0), (1.8, 1.5), (1.5, -0.5)])
def test_against_extended_precision(a, b):
    # u = r^{1/a} covers the series, the expansion and the Mellin-Barnes zone
    for u in [0.01, 0.7, 3.0, 6.5, 12.0, 25.0, 60.0]:
        r = u ** a
        ref = mp_mittag_leffler(a, b, r)
        got = ml_eval(a, b, r)
        assert abs(got - ref) <= 1e-11 * max(abs(ref), 1e-3), (r, got, ref)


@pytest.mark.parametrize("a,b", [(0.4, 1.0), (0.9, 0.3), (1.3, 1.0), (1.8, 1.5)])
def test_far_field_against_extended_precision(a, b):
    for u in (150.0, 400.0):
        r = u ** a
        ref = mp_ml_asymptotic(a, b, r)
        assert ml_eval(a, b, r) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.3, 1.95), st.floats(-1.0, 2.5), st.floats(0.0, 60.0))
def test_random_against_extended_precision(a, b, u):
    ref = mp_mittag_leffler(a, b, u ** a)
    got = ml_eval(a, b, u ** a)
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-2)


@pytest.mark.parametrize("a,b", [(0.5, 1.0), (0.9, 1.0), (1.2, 0.8), (1.6, 1.4)])
def test_branches_agree_at_switches(a, b):
    # series and the expansion never both reach 1e-8 in double precision,
    # so each is compared with the Mellin-Barnes route at its own switch
    u = np.array([0.9, 1.0]) * SERIES_LIMIT
    r = u ** a
    assert ml_series(a, b, r) == pytest.approx(ml_hfox(a, b, r), rel=1e-8)
    r = np.array([40.0, 50.0]) ** a
    val, err = ml_asymptotic(a, b, r)
    assert np.all(err < 1e-13 * np.abs(val))
    assert val == pytest.approx(ml_hfox(a, b, r), rel=1e-8)


@pytest.mark.parametrize("a,b", [(0.5, 1.0), (0.9, 1.0), (1.2, 0.8), (1.6, 1.4)])
def test_expansion_error_estimate_is_honest(a, b):
    for u in (6.0, 8.0, 10.0, 12.0, 15.0):
        r = u ** a
        val, err = ml_asymptotic(a, b, r)
        assert abs(val[0] - mp_mittag_leffler(a, b, r)) <= 3 * err[0]


@pytest.mark.parametrize("a,b", [(0.5, 1.0), (0.9, 0.7), (1.4, 1.1), (1.9, 0.5)])
def test_consistency_with_fox_h(a, b):
    spec = ml_spec(a, b)
    for r in np.geomspace(0.1, 10, 7):
        assert abs(ml_eval(a, b, r) - foxh.eval(spec, r, 1e-12).value) < 1e-8


def test_heat_symbol_is_exponential():
    r = np.geomspace(1e-3, 700, 30)
    assert ml_eval(1.0, 1.0, r) == pytest.approx(np.exp(-r), rel=1e-15)
