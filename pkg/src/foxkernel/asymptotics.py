"""Regime classification and envelopes for D_x^n Delta^gamma D_t^sigma p.

Large M = |x|^{2 beta} t^{-alpha} cases are labelled T21 (i)-(vi), small M
cases T22 (i)-(v); T23 is the same bundle read as a one-sided bound on
M >= 1 or M <= 1.  Envelopes are exponent bundles

    |x|^{x_power} t^{t_power} (1 + |ln M|)^{log_factor} exp(-exp_rate M^{1/(2 beta - alpha)})
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, stats

from . import foxh
from .kernel import (INT_TOL, KernelParams, SpaceTimePoint, is_int, kernel_h_spec,
                     p_derivative, p_eval, p_log_abs, raw_kernel_spec)

LARGE_M = "large_M"
SMALL_M = "small_M"
TWO_SIDED_BAND = 50.0


@dataclass(frozen=True)
class RegimeCase:
    theorem: str
    case_label: str
    applicable: bool
    unverified_flag: bool = False
    branch: str = ""


@dataclass(frozen=True)
class Envelope:
    x_power: float
    t_power: float
    log_factor: bool = False
    exp_rate: float = 0.0
    exp_x_power: float = 0.0
    exp_t_power: float = 0.0
    two_sided: bool = False

    def __call__(self, t, x_norm, M):
        """Envelope value at (t, |x|) with similarity variable M."""
        return math.exp(self.log_value(t, x_norm, M))

    def log_value(self, t, x_norm, M):
        v = self.x_power * math.log(x_norm) + self.t_power * math.log(t)
        if self.log_factor:
            v += math.log1p(abs(math.log(M)))
        if self.exp_rate:
            v -= self.exp_rate * x_norm ** self.exp_x_power * t ** self.exp_t_power
        return v


@dataclass(frozen=True)
class LeadingCoefficients:
    kappa1: float
    kappa2: float
    kappa1_hat: float
    kappa2_hat: float


def _near(a, b):
    return abs(a - b) < INT_TOL


def classify(params: KernelParams, n: int = 0, side: str = LARGE_M) -> RegimeCase:
    p = params
    beta_nat = is_int(p.beta, positive=True)
    gamma_int = is_int(p.gamma)
    heat = p.heat_like
    sa_nat = is_int(p.sigma + p.alpha, positive=True)
    g_eq_b = _near(p.gamma, p.beta)
    if side == LARGE_M:
        if beta_nat and gamma_int:
            return RegimeCase("T21", "i", True, branch="exp")
        if heat:
            return RegimeCase("T21", "ii", True, branch="int" if gamma_int else "frac")
        if 0 < p.gamma < p.beta and not is_int(p.gamma, positive=True) and not g_eq_b:
            return RegimeCase("T21", "iii", True)
        if not beta_nat and gamma_int and p.gamma < p.beta and not g_eq_b:
            return RegimeCase("T21", "iv", True)
        if g_eq_b:
            branch = "fast" if (beta_nat or is_int(p.sigma, positive=True)) else "slow"
            if p.d >= 2:
                return RegimeCase("T21", "v", True, branch=branch)
            return RegimeCase("T21", "vi", True, unverified_flag=not sa_nat, branch=branch)
        return RegimeCase("T21", "", False)
    if side == SMALL_M:
        if heat:
            return RegimeCase("T22", "iii", True)
        if p.gamma < p.beta and not g_eq_b:
            if not sa_nat:
                return RegimeCase("T22", "i", True, branch=_tri(p.gamma, p.beta - p.d / 2, n))
            return RegimeCase("T22", "ii", True, branch=_tri(p.gamma, 2 * p.beta - p.d / 2, n))
        if g_eq_b:
            # d/2 (+1 for derivatives) against beta
            br = _tri(p.d / 2 + (1 if n else 0), p.beta, 0)
            if p.d >= 2:
                return RegimeCase("T22", "iv", True, branch=br)
            return RegimeCase("T22", "v", True, unverified_flag=not sa_nat, branch=br)
        return RegimeCase("T22", "", False)
    raise ValueError(f"side must be {LARGE_M!r} or {SMALL_M!r}")


def _tri(g, threshold, n):
    """'below' / 'log' / 'above' relative to threshold (shifted by 1 for n >= 1)."""
    thr = threshold - (1 if n else 0)
    if _near(g, thr):
        return "log"
    return "below" if g < thr else "above"


def exp_rate(params: KernelParams) -> float:
    """Rate c in exp(-c M^{1/(2 beta - alpha)}) from the Mellin-Barnes saddle.

    Uses the beta in N, gamma = 0 spec: the polynomial factor that a
    positive integer gamma adds does not change the exponential rate.
    """
    base = KernelParams(params.d, params.alpha, params.beta, 0.0, params.sigma)
    spec = kernel_h_spec(base)
    dc = foxh.derived_constants(spec)
    tail = sum(dl for _, dl in spec.lower[spec.m:])
    c = math.cos((dc.alpha_star + tail) / dc.omega * math.pi)
    # rho = arg_scale * M / 4^beta
    k = spec.arg_scale * 4.0 ** (-params.beta) / dc.eta
    return -c * dc.omega * k ** (1.0 / dc.omega)


def envelope(params: KernelParams, n: int = 0, side: str = LARGE_M) -> Envelope:
    case = classify(params, n, side)
    if not case.applicable:
        raise ValueError(f"no theorem case applies to {params} on side {side}")
    p = params
    d, a, b, g, s = p.d, p.alpha, p.beta, p.gamma, p.sigma
    two = n == 0
    if case.theorem == "T21":
        lab = case.case_label
        if lab == "i":
            om = 2 * b - a
            return Envelope(-d - 2 * g - n, -s, exp_rate=exp_rate(p),
                            exp_x_power=2 * b / om, exp_t_power=-a / om, two_sided=False)
        if lab == "ii":
            if case.branch == "int":
                return Envelope(-d - 2 * g - 2 * b - n, 1.0, two_sided=two)
            return Envelope(-d - 2 * g - n, 0.0, two_sided=two)
        if lab == "iii":
            return Envelope(-d - 2 * g - n, -s, two_sided=two)
        if lab == "iv":
            return Envelope(-d - 2 * g - 2 * b - n, -s + a, two_sided=two)
        if case.branch == "fast":
            return Envelope(-d - 4 * b - n, -s + a, two_sided=two)
        return Envelope(-d - 2 * b - n, -s, two_sided=two)
    lab = case.case_label
    if lab == "iii":
        if n == 0:
            return Envelope(0.0, -(d + 2 * g) / (2 * b), two_sided=True)
        return Envelope(2.0 - n, -(d + 2 * g + 2) / (2 * b))
    if lab in ("i", "ii"):
        k = 1 if lab == "i" else 2
        if n == 0:
            if case.branch == "below":
                return Envelope(0.0, -s - a * (d + 2 * g) / (2 * b), two_sided=True)
            return Envelope(-d - 2 * g + 2 * k * b, -s - k * a,
                            log_factor=case.branch == "log", two_sided=True)
        if case.branch == "below":
            return Envelope(2.0 - n, -s - a * (d + 2 * g + 2) / (2 * b))
        if case.branch == "log":
            return Envelope(2.0 - n, -s - k * a, log_factor=True)
        return Envelope(-d - 2 * g + 2 * k * b - n, -s - k * a)
    # T22 (iv), (v): gamma = beta
    if n == 0:
        if case.branch == "below":
            return Envelope(0.0, -s - a - a * d / (2 * b), two_sided=True)
        return Envelope(-d + 2 * b, -s - 2 * a, log_factor=case.branch == "log", two_sided=True)
    if case.branch == "below":
        return Envelope(2.0 - n, -s - a - a * (d + 2) / (2 * b))
    if case.branch == "log":
        return Envelope(2.0 - n, -s - 2 * a, log_factor=True)
    return Envelope(-d + 2 * b - n, -s - 2 * a)


def leading_coefficients(params: KernelParams) -> LeadingCoefficients:
    """kappa_1, kappa_2 (residues) and their order-2 limits at -(d/2+gamma)/beta and -1."""
    spec = raw_kernel_spec(params)
    z1 = -(params.d / 2 + params.gamma) / params.beta
    k1, k1h = foxh.laurent_leading(spec, z1)
    k2, k2h = foxh.laurent_leading(spec, -1.0)
    return LeadingCoefficients(k1, k2, k1h, k2h)


def small_r_leading(params: KernelParams, q: int = 0):
    """(coefficient, power): HH^{(q)}(r) ~ coefficient r^power from the first left pole.

    The sign is + for either sign of omega: the small-r expansion is the
    sum of left residues in both branches.
    """
    lead = leading_coefficients(params)
    z1 = -(params.d / 2 + params.gamma) / params.beta
    return z1 ** q * lead.kappa1, -z1


# ---------------------------------------------------------------- empirical checks

def _value(params, n, t, x_norm, direction=None):
    d = params.d
    if direction is None:
        direction = np.linspace(1.0, 0.5, d)
        direction = direction / np.linalg.norm(direction)
    x = tuple(x_norm * np.asarray(direction))
    pt = SpaceTimePoint(t, x)
    if n == 0:
        return p_eval(params, pt)
    return p_derivative(params, pt, (n,) + (0,) * (d - 1))


@dataclass
class RatioReport:
    case: RegimeCase
    envelope: Envelope
    ratios: list
    min_ratio: float
    max_ratio: float
    spread: float
    passed: bool


def ratio_check(params: KernelParams, n: int, side: str, grid: Sequence[float],
                tol_band: float = TWO_SIDED_BAND, t: float = 1.0) -> RatioReport:
    """|D^n p| / envelope along M-grid at fixed t."""
    case = classify(params, n, side)
    env = envelope(params, n, side)
    ratios = []
    for M in grid:
        xn = (M * t ** params.alpha) ** (1.0 / (2 * params.beta))
        if n == 0:
            lv = p_log_abs(params, t, xn)
        else:
            lv = math.log(abs(_value(params, n, t, xn)))
        ratios.append(math.exp(min(lv - env.log_value(t, xn, M), 700.0)))
    lo, hi = min(ratios), max(ratios)
    spread = hi / lo if lo > 0 else math.inf
    if env.two_sided:
        ok = spread < tol_band
    else:
        ok = math.isfinite(hi)
    return RatioReport(case, env, ratios, lo, hi, spread, ok)


@dataclass
class SlopeFit:
    slope: float
    expected: float
    passed: bool


def _slope_ok(fitted, expected, rel=0.02, abs_zero=0.02):
    if abs(expected) < 1e-12:
        return abs(fitted) < abs_zero
    return abs(fitted - expected) <= rel * abs(expected)


def _fit_slope(logv, ys, L, log_factor):
    """Slope of ln|y| against logv; with a log branch, ln(1 + k L) is fitted jointly."""
    lny = np.log(ys)
    if not log_factor:
        return stats.linregress(logv, lny).slope

    def model(_, c, s, k):
        return c + s * logv + np.log(np.abs(1.0 + k * L))

    p0 = (lny[0] - stats.linregress(logv, lny).slope * logv[0],
          stats.linregress(logv, lny).slope, 1.0)
    popt, _ = optimize.curve_fit(model, logv, lny, p0=p0, maxfev=20000)
    return popt[1]


def x_slope(params: KernelParams, n: int, M_range, t: float = 1.0, points: int = 12) -> SlopeFit:
    """Log-log slope of |D^n p| against |x| at fixed t, M spanning M_range."""
    env = envelope(params, n, LARGE_M if M_range[0] >= 1 else SMALL_M)
    Ms = np.geomspace(M_range[0], M_range[1], points)
    xs = (Ms * t ** params.alpha) ** (1.0 / (2 * params.beta))
    ys = np.array([abs(_value(params, n, t, x)) for x in xs])
    slope = _fit_slope(np.log(xs), ys, np.log(1.0 / Ms), env.log_factor)
    return SlopeFit(slope, env.x_power, _slope_ok(slope, env.x_power))


def t_slope(params: KernelParams, n: int, M_range, x_norm: float = 1.0, points: int = 12) -> SlopeFit:
    """Log-log slope of |D^n p| against t at fixed |x|."""
    env = envelope(params, n, LARGE_M if M_range[0] >= 1 else SMALL_M)
    Ms = np.geomspace(M_range[0], M_range[1], points)
    ts = (x_norm ** (2 * params.beta) / Ms) ** (1.0 / params.alpha)
    ys = np.array([abs(_value(params, n, t, x_norm)) for t in ts])
    slope = _fit_slope(np.log(ts), ys, np.log(1.0 / Ms), env.log_factor)
    return SlopeFit(slope, env.t_power, _slope_ok(slope, env.t_power))


@dataclass
class LogFit:
    coeff: float
    stderr: float
    r_squared: float
    significant: bool


def log_branch_fit(params: KernelParams, n: int = 0, M_range=(1e-4, 1e-2), t: float = 1.0,
                   points: int = 50) -> LogFit:
    """Fit |p| / (|x|^a t^b) = A + B ln(1/M); B != 0 at 95% confidence."""
    env = envelope(params, n, SMALL_M)
    Ms = np.geomspace(M_range[0], M_range[1], points)
    xs = (Ms * t ** params.alpha) ** (1.0 / (2 * params.beta))
    ys = np.array([abs(_value(params, n, t, x)) / (x ** env.x_power * t ** env.t_power)
                   for x in xs])
    fit = stats.linregress(np.log(1.0 / Ms), ys)
    tcrit = stats.t.ppf(0.975, points - 2)
    return LogFit(fit.slope, fit.stderr, fit.rvalue ** 2,
                  abs(fit.slope) > tcrit * fit.stderr)


@dataclass
class ExpFit:
    rate: float
    intercept: float
    r_squared: float


def exp_decay_fit(params: KernelParams, M_range=(10.0, 1e3), t: float = 1.0,
                  points: int = 40) -> ExpFit:
    """Regress ln|p| on M^{1/(2 beta - alpha)} at fixed t.

    ln|p| is taken from the log-scaled evaluation, so it stays finite far
    below the double-precision underflow threshold.
    """
    om = 2 * params.beta - params.alpha
    Ms = np.geomspace(M_range[0], M_range[1], points)
    xs = (Ms * t ** params.alpha) ** (1.0 / (2 * params.beta))
    ys = np.array([p_log_abs(params, t, x) for x in xs])
    fit = stats.linregress(Ms ** (1.0 / om), ys)
    return ExpFit(fit.slope, fit.intercept, fit.rvalue ** 2)
