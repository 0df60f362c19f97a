"""Fundamental solution p_{sigma,gamma}(t, x) of d_t^alpha u = -(-Delta)^beta u.

    p(t, x) = 2^{2 gamma} pi^{-d/2} |x|^{-d-2 gamma} t^{-sigma} HH(R),
    R = |x|^{2 beta} 2^{-2 beta} t^{-alpha},

where HH is the H^{21}_{23} function with Mellin-Barnes density

    calH(z) = G(d/2 + gamma + beta z) G(1 + z) G(-z)
              / (G(-gamma - beta z) G(1 - sigma + alpha z)).

HH^{(q)} uses calH(z) z^q and satisfies HH^{(q+1)}(r) = -r d/dr HH^{(q)}(r).
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import foxh
from .foxh import HFunctionSpec
from .mittag_leffler import ml_eval

INT_TOL = 1e-9


def is_int(v, positive=False):
    k = round(v)
    ok = abs(v - k) < INT_TOL
    return ok and (k >= 1 if positive else k >= 0)


class InvalidParameters(ValueError):
    pass


class SingularPointError(ValueError):
    """The kernel is not defined at x = 0."""


@dataclass(frozen=True)
class KernelParams:
    d: int
    alpha: float
    beta: float
    gamma: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InvalidParameters(f"d must be a positive integer, got {self.d}")
        if not 0.0 < self.alpha < 2.0:
            raise InvalidParameters(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.beta > 0.0:
            raise InvalidParameters(f"beta must be positive, got {self.beta}")
        if not self.gamma >= 0.0:
            raise InvalidParameters(f"gamma must be nonnegative, got {self.gamma}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def heat_like(self):
        return abs(self.alpha - 1.0) < INT_TOL and abs(self.sigma) < INT_TOL

    @property
    def integrable(self):
        return self.gamma <= self.beta + INT_TOL or self.heat_like

    @property
    def paper_unverified(self):
        return (self.d == 1 and abs(self.gamma - self.beta) < INT_TOL
                and not is_int(self.sigma + self.alpha, positive=True))

    def flags(self):
        out = []
        if not self.integrable:
            out.append("non_integrable")
        if self.paper_unverified:
            out.append("paper_unverified")
        return out


@dataclass(frozen=True)
class SpaceTimePoint:
    t: float
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in np.atleast_1d(self.x)))
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")

    @property
    def norm(self):
        return math.sqrt(math.fsum(v * v for v in self.x))


def similarity_M(params: KernelParams, t, x_norm):
    return x_norm ** (2 * params.beta) * t ** (-params.alpha)


def _zq(spec: HFunctionSpec, q: int) -> HFunctionSpec:
    # calH(z) * (Gamma(1+z)/Gamma(z))^q
    for _ in range(q):
        spec = replace(spec, m=spec.m + 1, lower=((1.0, 1.0),) + spec.lower,
                       upper=spec.upper + ((0.0, 1.0),))
    return spec


def raw_kernel_spec(params: KernelParams) -> HFunctionSpec:
    """The H^{21}_{23} spec without removable-singularity rewrites."""
    p = params
    return HFunctionSpec(
        m=2, n=1,
        upper=((1.0, 1.0), (1.0 - p.sigma, p.alpha)),
        lower=((p.d / 2 + p.gamma, p.beta), (1.0, 1.0), (1.0 + p.gamma, p.beta)))


def kernel_h_spec(params: KernelParams, q: int = 0) -> HFunctionSpec:
    """Spec of HH^{(q)}, with the removable singularities rewritten away.

    gamma = 0:   G(-z)/G(-beta z) = beta G(1-z)/G(1-beta z)
    gamma = beta: G(1+z)/G(-beta(1+z)) = -beta G(2+z)/G(1-beta-beta z)
    beta in N, gamma = 0: Gauss multiplication removes the right lattice.
    """
    p = params
    if q < 0:
        raise ValueError("q must be nonnegative")
    g0 = abs(p.gamma) < INT_TOL
    if g0 and is_int(p.beta, positive=True):
        b = int(round(p.beta))
        lower = ((p.d / 2, float(b)), (1.0, 1.0)) + tuple((1.0 - k / b, 1.0) for k in range(1, b))
        spec = HFunctionSpec(
            m=2, n=0, upper=((1.0 - p.sigma, p.alpha),), lower=lower,
            scale=(2 * math.pi) ** ((b - 1) / 2) * math.sqrt(b), arg_scale=float(b) ** (-b))
    elif g0:
        spec = HFunctionSpec(
            m=2, n=1, upper=((0.0, 1.0), (1.0 - p.sigma, p.alpha)),
            lower=((p.d / 2, p.beta), (1.0, 1.0), (0.0, p.beta)), scale=p.beta)
    elif abs(p.gamma - p.beta) < INT_TOL:
        spec = HFunctionSpec(
            m=2, n=1, upper=((1.0, 1.0), (1.0 - p.sigma, p.alpha)),
            lower=((p.d / 2 + p.beta, p.beta), (2.0, 1.0), (p.beta, p.beta)), scale=-p.beta)
    else:
        spec = raw_kernel_spec(p)
    return _zq(spec, q)


def h_sigma_gamma(params: KernelParams, q: int, r: float, tol: float = 1e-10):
    """HH^{(q)}_{sigma,gamma}(r) as an EvalResult."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return foxh.eval(kernel_h_spec(params, q), r, tol)


def _prefactor(params, t, x_norm):
    p = params
    return (2.0 ** (2 * p.gamma) * math.pi ** (-p.d / 2)
            * x_norm ** (-p.d - 2 * p.gamma) * t ** (-p.sigma))


def _R(params, t, x_norm):
    b = params.beta
    return (x_norm / 2.0) ** (2 * b) * t ** (-params.alpha)


def p_eval_full(params: KernelParams, pt: SpaceTimePoint, tol: float = 1e-10):
    """p_{sigma,gamma}(t, x) as an EvalResult (value, error, method, flags)."""
    xn = pt.norm
    if xn == 0.0:
        raise SingularPointError("the kernel is defined for x != 0 only")
    res = h_sigma_gamma(params, 0, _R(params, pt.t, xn), tol)
    c = _prefactor(params, pt.t, xn)
    return foxh.EvalResult(c * res.value, abs(c) * res.abs_error_estimate, res.method,
                           res.ell, res.crossed, params.flags())


def p_eval(params: KernelParams, pt: SpaceTimePoint, tol: float = 1e-10) -> float:
    return p_eval_full(params, pt, tol).value


def p_log_abs(params: KernelParams, t: float, x_norm: float, tol: float = 1e-10) -> float:
    """log|p(t, x)|, finite even where p underflows double precision."""
    if x_norm <= 0:
        raise SingularPointError("the kernel is defined for x != 0 only")
    res = h_sigma_gamma(params, 0, _R(params, t, x_norm), tol)
    return math.log(_prefactor(params, t, x_norm)) + res.log_abs


def p_radial(params: KernelParams, t: float, x_norm: float, tol: float = 1e-10) -> float:
    return p_eval(params, SpaceTimePoint(t, (x_norm,) + (0.0,) * (params.d - 1)), tol)


# ---------------------------------------------------------------- spatial derivatives

def derivative_terms(params: KernelParams, multi_index: Sequence[int]):
    """Chain-rule expansion of D^a [ |x|^A HH(R) ] with A = -d - 2 gamma.

    Returns {(b, j, q): c} meaning sum c x^b |x|^{A - 2j} HH^{(q)}(R).
    Uses D_i HH^{(q)}(R) = -2 beta x_i |x|^{-2} HH^{(q+1)}(R).
    """
    A = -params.d - 2.0 * params.gamma
    two_beta = 2.0 * params.beta
    d = params.d
    if len(multi_index) != d:
        raise ValueError(f"multi-index must have length d={d}")
    terms = {((0,) * d, 0, 0): 1.0}
    for i, times in enumerate(multi_index):
        for _ in range(int(times)):
            new = defaultdict(float)
            for (b, j, q), c in terms.items():
                if b[i] > 0:
                    bm = b[:i] + (b[i] - 1,) + b[i + 1:]
                    new[(bm, j, q)] += c * b[i]
                bp = b[:i] + (b[i] + 1,) + b[i + 1:]
                new[(bp, j + 1, q)] += c * (A - 2 * j)
                new[(bp, j + 1, q + 1)] += -c * two_beta
            terms = {k: v for k, v in new.items() if v != 0.0}
    return terms


def p_derivative_full(params: KernelParams, pt: SpaceTimePoint, multi_index: Sequence[int],
                      tol: float = 1e-10):
    """D_x^a p_{sigma,gamma}(t, x) as an EvalResult.

    The error estimate adds the per-term estimates of every HH^{(q)} used.
    """
    xn = pt.norm
    if xn == 0.0:
        raise SingularPointError("the kernel is defined for x != 0 only")
    terms = derivative_terms(params, multi_index)
    R = _R(params, pt.t, xn)
    qs = sorted({q for (_, _, q) in terms})
    hq = {q: h_sigma_gamma(params, q, R, tol) for q in qs}
    x = np.array(pt.x)
    c0 = _prefactor(params, pt.t, xn)
    acc, err = [], []
    for (b, j, q), c in sorted(terms.items()):
        w = c * float(np.prod(x ** np.array(b))) * xn ** (-2 * j)
        acc.append(w * hq[q].value)
        err.append(abs(w) * hq[q].abs_error_estimate)
    methods = sorted({h.method for h in hq.values()})
    return foxh.EvalResult(c0 * math.fsum(acc), abs(c0) * math.fsum(err), "+".join(methods),
                           None, 0, params.flags())


def p_derivative(params: KernelParams, pt: SpaceTimePoint, multi_index: Sequence[int],
                 tol: float = 1e-10) -> float:
    """D_x^a p_{sigma,gamma}(t, x) by exact chain-rule bookkeeping."""
    return p_derivative_full(params, pt, multi_index, tol).value


# ---------------------------------------------------------------- time side

def time_derivative_params(params: KernelParams, m: float) -> KernelParams:
    """D_t^m p_{sigma,gamma} = p_{sigma+m,gamma}; also fractional orders."""
    return replace(params, sigma=params.sigma + m)


def scaling_exponent(params: KernelParams) -> float:
    return -params.sigma - params.alpha * (params.d + 2 * params.gamma) / (2 * params.beta)


def fourier_symbol(params: KernelParams, xi_norm: float, t: float) -> float:
    """|xi|^{2 gamma} t^{-sigma} E_{alpha,1-sigma}(-t^alpha |xi|^{2 beta})."""
    if not t > 0:
        raise ValueError("t must be positive")
    p = params
    lam = t ** p.alpha * xi_norm ** (2 * p.beta)
    pw = 1.0 if p.gamma == 0 else xi_norm ** (2 * p.gamma)
    return pw * t ** (-p.sigma) * ml_eval(p.alpha, 1.0 - p.sigma, lam)
