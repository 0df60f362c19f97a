"""Real-axis Mittag-Leffler function E_{alpha,beta}(-r), r >= 0, 0 < alpha < 2.

Three branches, chosen pointwise:

* power series (compensated summation) while r^{1/alpha} <= SERIES_LIMIT,
  where cancellation costs at most a few digits;
* the algebraic expansion  -sum_k (-r)^{-k} / Gamma(beta - alpha k)
  truncated at its smallest term (plus the saddle terms for alpha > 1),
  when that term is below tolerance;
* otherwise the H^{11}_{12}[r | (0,1); (0,1), (1-beta, alpha)] Mellin-Barnes
  integral on the line Re z = 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, rgamma

from . import foxh

SERIES_LIMIT = 6.0
DEFAULT_TOL = 1e-13


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta_ml: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")


def ml_spec(alpha, beta_ml):
    return foxh.HFunctionSpec(m=1, n=1, upper=((0.0, 1.0),),
                              lower=((0.0, 1.0), (1.0 - beta_ml, alpha)))


def ml_series(alpha, beta_ml, r):
    """Power series with Kahan summation; vectorised over r."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    x = -r
    s = np.zeros_like(r)
    comp = np.zeros_like(r)
    k_max = int(60 + 3.0 * (np.max(r, initial=0.0) ** (1.0 / alpha) * math.e + 40) / alpha)
    pw = np.ones_like(r)
    peak = np.zeros_like(r)
    for k in range(k_max):
        term = pw * rgamma(alpha * k + beta_ml)
        y = term - comp
        tmp = s + y
        comp = (tmp - s) - y
        s = tmp
        peak = np.maximum(peak, np.abs(term))
        if k > 5 and np.all(np.abs(term) <= 1e-18 * np.maximum(peak, 1e-300)):
            break
        pw = pw * x
    return s


def ml_asymptotic(alpha, beta_ml, r, k_max=80):
    """Algebraic expansion truncated at the smallest term.

    Returns (value, error_estimate) arrays.  For 1 < alpha < 2 the two
    exponentially small saddle terms are added explicitly; for alpha = 1
    the e^{-r} part is folded into the error estimate.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    ks = np.arange(1, k_max + 1)[:, None]
    arg = beta_ml - alpha * ks
    terms = -((-1.0) ** ks) * np.exp(-ks * np.log(r)[None, :]) * rgamma(arg)
    # truncate by the envelope |1/Gamma(x)| <= Gamma(1-x)/pi (x < 1), so that
    # coefficients that nearly vanish near a pole of Gamma do not stop it early
    log_env = np.where(arg < 1.0, gammaln(np.maximum(1.0 - arg, 1e-300)) - math.log(math.pi),
                       -gammaln(np.maximum(arg, 1e-300)))
    log_env = log_env - ks * np.log(r)[None, :]
    first_min = np.argmin(log_env, axis=0)
    idx = np.arange(k_max)[:, None]
    keep = idx < first_min[None, :]
    value = np.sum(np.where(keep, terms, 0.0), axis=0)
    err = np.exp(log_env[first_min, np.arange(r.size)])
    if alpha > 1.0 + 1e-12:
        # two conjugate saddle contributions, (2/alpha) Re[w^{1-beta} e^w]
        w = r.astype(complex) ** (1.0 / alpha) * np.exp(1j * math.pi / alpha)
        with np.errstate(over="ignore", invalid="ignore"):
            value = value + (2.0 / alpha) * (w ** (1.0 - beta_ml) * np.exp(w)).real
    elif alpha >= 1.0 - 1e-12:
        with np.errstate(over="ignore"):
            err = err + 2.0 * r ** (1.0 - beta_ml) * np.exp(-r)
    return value, err


def ml_hfox(alpha, beta_ml, r):
    """Mellin-Barnes route on the line Re z = 1/2 (vectorised)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return foxh.bromwich_fixed_line(ml_spec(alpha, beta_ml), r, ell=0.5)


def ml_eval(alpha, beta_ml=1.0, r=0.0, tol=DEFAULT_TOL):
    """E_{alpha,beta_ml}(-r) for scalar or array r >= 0.

    ``alpha`` may also be an MLParams instance, in which case the second
    positional argument is taken as r.
    """
    if isinstance(alpha, MLParams):
        alpha, beta_ml, r = alpha.alpha, alpha.beta_ml, beta_ml
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    r_in = np.asarray(r, dtype=float)
    if np.any(r_in < 0):
        raise ValueError("r must be nonnegative")
    rr = np.atleast_1d(r_in).ravel()
    if alpha == 1.0 and beta_ml == 1.0:
        out = np.exp(-rr)
        return float(out[0]) if r_in.ndim == 0 else out.reshape(r_in.shape)
    out = np.empty_like(rr)
    series = rr ** (1.0 / alpha) <= SERIES_LIMIT
    if np.any(series):
        out[series] = ml_series(alpha, beta_ml, rr[series])
    rest = ~series
    if np.any(rest):
        val, err = ml_asymptotic(alpha, beta_ml, rr[rest])
        good = err <= np.maximum(tol * np.abs(val), 1e-17 / rr[rest])
        sub = out[rest]
        sub[good] = val[good]
        if np.any(~good):
            sub[~good] = ml_hfox(alpha, beta_ml, rr[rest][~good])
        out[rest] = sub
    if r_in.ndim == 0:
        return float(out[0])
    return out.reshape(r_in.shape)
