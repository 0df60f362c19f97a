import itertools
import math

import numpy as np
import pytest

from foxkernel import asymptotics as asy
from foxkernel import foxh
from foxkernel.kernel import KernelParams, kernel_h_spec, raw_kernel_spec

from test_foxh import circle_residue

LARGE, SMALL = asy.LARGE_M, asy.SMALL_M


# ---------------------------------------------------------------- classification

def test_classify_examples():
    assert asy.classify(KernelParams(2, 0.6, 1.0, 0.0, 0.3)) == asy.RegimeCase("T21", "i", True, branch="exp")
    c = asy.classify(KernelParams(2, 1.0, 0.7, 0.2, 0.0))
    assert (c.theorem, c.case_label) == ("T21", "ii")
    c = asy.classify(KernelParams(1, 0.5, 0.6, 0.6, 0.9))
    assert c.case_label == "vi" and c.unverified_flag
    c = asy.classify(KernelParams(1, 0.5, 0.6, 0.6, 0.5))
    assert c.case_label == "vi" and not c.unverified_flag


@pytest.mark.parametrize("params,side,label,branch", [
    (KernelParams(2, 0.6, 0.7, 0.3, 0.2), LARGE, "iii", ""),
    (KernelParams(2, 0.6, 1.7, 0.0, 0.2), LARGE, "iv", ""),
    (KernelParams(2, 0.6, 1.7, 1.0, 0.2), LARGE, "iv", ""),
    (KernelParams(3, 0.6, 0.7, 0.7, 0.2), LARGE, "v", "slow"),
    (KernelParams(3, 0.6, 0.7, 0.7, 1.0), LARGE, "v", "fast"),
    (KernelParams(1, 1.0, 1.0, 0.0, 0.0), SMALL, "iii", ""),
    (KernelParams(1, 0.6, 2.0, 0.2, 0.49), SMALL, "i", "below"),
    (KernelParams(1, 0.6, 0.8, 0.3, 0.1), SMALL, "i", "log"),
    (KernelParams(3, 0.6, 1.0, 0.2, 0.1), SMALL, "i", "above"),
    (KernelParams(1, 0.5, 0.7, 0.2, 0.5), SMALL, "ii", "below"),
    (KernelParams(2, 0.3, 3.0, 3.0, 0.5), SMALL, "iv", "below"),
    (KernelParams(2, 0.7, 1.0, 1.0, 0.1), SMALL, "iv", "log"),
    (KernelParams(1, 0.5, 0.5, 0.5, 0.5), SMALL, "v", "log"),
])
def test_classify_table(params, side, label, branch):
    c = asy.classify(params, 0, side)
    assert c.applicable and c.case_label == label and c.branch == branch


def test_classifier_totality():
    seen = set()
    for d, a, b, gf, s, n, side in itertools.product(
            [1, 2, 3], [0.5, 1.0, 1.5], [0.4, 1.0, 1.7, 2.0], [0.0, 0.5, 1.0, 1.5],
            [-0.5, 0.0, 0.5, 1.0], [0, 1], [LARGE, SMALL]):
        p = KernelParams(d, a, b, gf * b, s)
        c = asy.classify(p, n, side)
        assert c.theorem == ("T21" if side == LARGE else "T22")
        if c.applicable:
            env = asy.envelope(p, n, side)
            assert math.isfinite(env.x_power) and math.isfinite(env.t_power)
            seen.add((c.theorem, c.case_label))
        else:
            with pytest.raises(ValueError):
                asy.envelope(p, n, side)
    assert len(seen) == 11
    with pytest.raises(ValueError):
        asy.classify(KernelParams(1, 0.5, 0.5), 0, "middle")


# ---------------------------------------------------------------- envelopes

def test_envelope_t21_iii():
    env = asy.envelope(KernelParams(2, 0.6, 0.7, 0.3, 0.2), 0, LARGE)
    assert (env.x_power, env.t_power, env.two_sided) == (pytest.approx(-2.6), -0.2, True)


def test_envelope_t22_i_below():
    p = KernelParams(1, 0.6, 2.0, 0.2, 0.49)
    env = asy.envelope(p, 0, SMALL)
    assert env.x_power == 0.0
    assert env.t_power == pytest.approx(-0.49 - 0.6 * 1.4 / 4)


def test_envelope_t21_v_slow():
    env = asy.envelope(KernelParams(3, 0.6, 0.7, 0.7, 0.2), 0, LARGE)
    assert (env.x_power, env.t_power) == (pytest.approx(-4.4), -0.2)


def test_envelope_t21_iv_and_derivatives():
    p = KernelParams(2, 0.6, 1.7, 0.0, 0.2)
    env = asy.envelope(p, 2, LARGE)
    assert env.x_power == pytest.approx(-2 - 3.4 - 2)
    assert env.t_power == pytest.approx(0.4)
    assert not env.two_sided


def test_exp_envelope_positive_rate():
    for b in (1.0, 2.0):
        env = asy.envelope(KernelParams(2, 0.5, b), 0, LARGE)
        assert env.exp_rate > 0
        assert env.exp_x_power == pytest.approx(2 * b / (2 * b - 0.5))
    heat = asy.envelope(KernelParams(1, 1.0, 1.0), 0, LARGE)
    assert heat.exp_rate == pytest.approx(0.25)


def test_envelope_value():
    env = asy.Envelope(-2.0, 0.5, log_factor=True)
    assert env(4.0, 2.0, math.e) == pytest.approx(2.0 ** -2 * 2.0 * 2.0)
    assert env.log_value(4.0, 2.0, math.e) == pytest.approx(math.log(env(4.0, 2.0, math.e)))


# ---------------------------------------------------------------- coefficients

def test_kappa_hat_two_vanishes_for_integer_sigma_alpha():
    lead = asy.leading_coefficients(KernelParams(1, 0.6, 0.8, 0.2, 0.4))
    assert lead.kappa2_hat == 0.0
    assert lead.kappa2 == 0.0


def test_kappa_two_vanishes_for_gamma_beta():
    assert asy.leading_coefficients(KernelParams(2, 0.6, 0.8, 0.8, 0.3)).kappa2 == 0.0


def test_kappa_nonzero_double_pole():
    lead = asy.leading_coefficients(KernelParams(1, 0.6, 0.8, 0.3, 0.1))
    assert lead.kappa1_hat != 0.0


@pytest.mark.parametrize("p", [KernelParams(2, 0.6, 0.7, 0.3, 0.2), KernelParams(3, 1.3, 1.6, 0.1, -0.4)])
def test_kappa_matches_contour_average(p):
    lead = asy.leading_coefficients(p)
    spec = raw_kernel_spec(p)
    z1 = -(p.d / 2 + p.gamma) / p.beta
    assert lead.kappa1 == pytest.approx(circle_residue(spec, z1), rel=1e-8)
    assert lead.kappa2 == pytest.approx(circle_residue(spec, -1.0), rel=1e-8)


# first left pole -(d/2+gamma)/beta well to the right of -1
@pytest.mark.parametrize("p", [KernelParams(1, 0.6, 2.0, 0.2, 0.3), KernelParams(2, 1.2, 2.5, 0.1, -0.3),
                               KernelParams(2, 0.8, 2.2, 0.0, 0.2)])
def test_leading_term_small_r(p):
    coeff, power = asy.small_r_leading(p)
    r = 1e-5
    val = foxh.eval_residue_series(kernel_h_spec(p), r, 1e-13).value
    assert val == pytest.approx(coeff * r ** power, rel=1e-2)


# ---------------------------------------------------------------- empirical checks

def test_ratio_check_gaussian():
    rep = asy.ratio_check(KernelParams(1, 1.0, 1.0), 0, LARGE, np.geomspace(1, 1e3, 15))
    assert rep.passed
    assert rep.max_ratio < 50 * rep.min_ratio


def test_ratio_check_two_sided():
    rep = asy.ratio_check(KernelParams(2, 0.6, 0.7, 0.3, 0.2), 0, LARGE, np.geomspace(10, 1e4, 8))
    assert rep.envelope.two_sided and rep.passed


def test_ratio_check_derivative_upper_bound():
    rep = asy.ratio_check(KernelParams(2, 0.6, 0.7, 0.3, 0.2), 1, SMALL, np.geomspace(1e-4, 1e-1, 6))
    assert not rep.envelope.two_sided and rep.passed


def test_slope_t22_i_above():
    fit = asy.x_slope(KernelParams(3, 0.6, 1.0, 0.2, 0.1), 0, (1e-4, 1e-2))
    assert fit.expected == pytest.approx(-3 - 0.4 + 2)
    assert fit.passed


def test_slope_t22_i_below_is_flat():
    fit = asy.x_slope(KernelParams(1, 0.6, 2.0, 0.2, 0.49), 0, (1e-4, 1e-2))
    assert abs(fit.slope) < 0.02


def test_t_slope_t21_iv():
    fit = asy.t_slope(KernelParams(2, 1.7, 0.6, 0.0, -0.6), 0, (1e2, 1e4))
    assert fit.expected == pytest.approx(0.6 + 1.7)
    assert fit.passed


def test_log_branch_detected():
    fit = asy.log_branch_fit(KernelParams(1, 0.6, 0.8, 0.3, 0.1))
    assert fit.significant


def test_exp_fit_negative_rate():
    fit = asy.exp_decay_fit(KernelParams(2, 0.5, 1.0))
    assert fit.rate < 0 and fit.r_squared > 0.99
