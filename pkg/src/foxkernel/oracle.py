"""Independent reference values for the kernel.

The main route inverts the Fourier symbol radially,

    p(t, x) = (2 pi)^{-d/2} |x|^{1-d/2} int_0^inf S(rho) rho^{d/2} J_{d/2-1}(rho |x|) d rho,

with S(rho) = rho^{2 gamma} t^{-sigma} E_{alpha,1-sigma}(-t^alpha rho^{2 beta}).
S decays only algebraically, so the leading terms of its large-rho
expansion are removed first.  Each is matched by a Bessel potential
(a^2 + rho^2)^{-e/2} whose inverse transform is a closed-form K-Bessel
expression.  The remainder decays fast enough that panel sums between
Bessel zeros, accelerated with Wynn's epsilon algorithm, converge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn, jv, kv, rgamma

from . import foxh
from .kernel import KernelParams, SpaceTimePoint, h_sigma_gamma, kernel_h_spec
from .mittag_leffler import ml_eval


class OracleConvergenceError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved error {achieved:.3g})")
        self.achieved = achieved


@dataclass(frozen=True)
class QuadratureConfig:
    max_panels: int = 200
    panel_points: int = 24
    tail_cutoff: float = 1.0
    tol: float = 1e-10

    def __post_init__(self):
        for name in ("max_panels", "panel_points", "tail_cutoff", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def bessel_j(order, r):
    """J_order(r) for order >= -1/2, r >= 0."""
    if order < -0.5:
        raise ValueError("order must be >= -1/2")
    return jv(order, r)


def closed_form_reference(family: str, d: int, t: float, x) -> float:
    """Heat (gaussian) or Poisson kernel at (t, x); x may be a vector or a norm."""
    xn = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
    if family == "gaussian":
        return (4 * math.pi * t) ** (-d / 2) * math.exp(-xn * xn / (4 * t))
    if family == "poisson":
        c = math.gamma((d + 1) / 2) / math.pi ** ((d + 1) / 2)
        return c * t * (t * t + xn * xn) ** (-(d + 1) / 2)
    raise ValueError(f"unknown family {family!r}")


def reference_family(params: KernelParams):
    """'gaussian', 'poisson' or None."""
    p = params
    if p.gamma != 0 or p.sigma != 0 or p.alpha != 1:
        return None
    if p.beta == 1:
        return "gaussian"
    if p.beta == 0.5:
        return "poisson"
    return None


_FD_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
}


def finite_difference(f: Callable, point, direction, order: int, h: float) -> float:
    """Central difference of f along direction, O(h^2)."""
    if order not in _FD_STENCILS:
        raise ValueError("order must be 1, 2 or 3")
    if not h > 0:
        raise ValueError("h must be positive")
    x0 = np.atleast_1d(np.asarray(point, dtype=float))
    u = np.atleast_1d(np.asarray(direction, dtype=float))
    u = u / np.linalg.norm(u)
    reach = 2 if order == 3 else 1
    if x0.size > 1 and np.linalg.norm(x0) <= reach * h:
        raise ValueError("stencil reaches the origin; shrink h")
    acc = []
    for k, w in _FD_STENCILS[order]:
        y = x0 + k * h * u
        acc.append(w * f(y if y.size > 1 else float(y[0])))
    return math.fsum(acc) / h ** order


# ---------------------------------------------------------------- Fourier inversion

def _symbol(params, t, rho, tol=1e-13):
    p = params
    lam = t ** p.alpha * rho ** (2 * p.beta)
    s = t ** (-p.sigma) * ml_eval(p.alpha, 1.0 - p.sigma, lam, tol)
    if p.gamma:
        s = s * rho ** (2 * p.gamma)
    return s


def _power_tail(params, t, decay):
    """{e: c} with S(rho) ~ sum c rho^{-e}, for all e < decay."""
    p = params
    out = {}
    if p.gamma > p.beta:
        # only the heat-like case is integrable here, and its symbol decays exponentially
        return out
    k = 1
    while 2 * p.beta * k - 2 * p.gamma < decay:
        c = -((-1.0) ** k) * t ** (-p.sigma - p.alpha * k) * rgamma(1.0 - p.sigma - p.alpha * k)
        if c != 0.0:
            e = 2 * p.beta * k - 2 * p.gamma
            out[e] = out.get(e, 0.0) + c
        k += 1
    return out


def _potential_basis(powers, a, decay):
    """Rewrite a power expansion as sum b (a^2 + rho^2)^{-e/2}, up to rho^{-decay}."""
    pending = dict(powers)
    basis = []
    while pending:
        e = min(pending)
        if e >= decay:
            break
        b = pending.pop(e)
        if abs(b) == 0.0:
            continue
        basis.append((e, b))
        # (a^2 + rho^2)^{-e/2} = sum_j binom(-e/2, j) a^{2j} rho^{-e-2j}
        j, coef = 1, 1.0
        while e + 2 * j < decay:
            coef *= (-e / 2 - (j - 1)) / j
            key = e + 2 * j
            pending[key] = pending.get(key, 0.0) - b * coef * a ** (2 * j)
            j += 1
    return basis


def _potential_kernel(e, a, d, r):
    """Inverse d-dim Fourier transform of (a^2 + |xi|^2)^{-e/2} at |x| = r > 0."""
    if abs(e) < 1e-14:
        return 0.0  # a delta at the origin
    nu = (d - e) / 2
    return ((2 * math.pi) ** (-d / 2) * 2 ** (1 - e / 2) / gamma_fn(e / 2)
            * a ** (d - e) * (a * r) ** (-nu) * kv(nu, a * r))


def _wynn(sums):
    """Wynn epsilon extrapolation; returns (limit, error estimate)."""
    s = list(sums)
    n = len(s)
    if n < 3:
        return s[-1], abs(s[-1] - s[-2]) if n > 1 else math.inf
    prev = [0.0] * (n + 1)
    cur = s[:]
    best, err = s[-1], abs(s[-1] - s[-2])
    evens = [cur]
    for k in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0.0:
                nxt.append(math.inf)
            else:
                nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        if k % 2 == 0 and len(cur) >= 2 and all(map(math.isfinite, cur[-2:])):
            e = abs(cur[-1] - cur[-2])
            if e < err:
                best, err = cur[-1], e
            evens.append(cur)
        if len(cur) < 2:
            break
    return best, err


def _panel_edges(r, nu, a, count):
    """Near-zeros of J_nu(rho r), refined with symbol-scale points near the origin."""
    zeros = (np.arange(1, count + 1) + nu / 2 - 0.25) * math.pi / r
    head = a * np.geomspace(2.0 ** -24, 4.0, 27)
    inner = np.concatenate([head, zeros])
    inner = np.unique(inner[inner > 0])
    return np.concatenate([[0.0], inner]), zeros


def p_via_inversion(params: KernelParams, pt: SpaceTimePoint,
                    cfg: QuadratureConfig | None = None, return_error: bool = False,
                    refine: bool = False):
    """p_{sigma,gamma}(t, x) by radial Fourier inversion.

    The error estimate is the epsilon-table spread; with ``refine`` the
    quadrature is repeated with doubled panel points and the change is
    included.  Terms with exponent e >= d make the subtraction cancel
    heavily, so ``tail_cutoff`` stays small.
    """
    cfg = cfg or QuadratureConfig()
    p = params
    if not p.integrable:
        raise ValueError("non-integrable regime: gamma > beta needs alpha = 1, sigma = 0")
    t, r, d = pt.t, pt.norm, p.d
    if r == 0.0:
        raise ValueError("the inversion route needs x != 0")
    a = t ** (-p.alpha / (2 * p.beta))
    nu = d / 2 - 1
    # remainder after subtraction decays like rho^{-decay + d/2 - 1/2}
    decay = d / 2 + 0.5 + cfg.tail_cutoff
    basis = _potential_basis(_power_tail(p, t, decay), a, decay)

    def integrand(rho):
        s = _symbol(p, t, rho, cfg.tol)
        for e, b in basis:
            s = s - b * (a * a + rho * rho) ** (-e / 2)
        if d == 1:
            return s * np.cos(rho * r) / math.pi
        return s * rho ** (d / 2) * jv(nu, rho * r) * (2 * math.pi) ** (-d / 2) * r ** (1 - d / 2)

    def integrate(points):
        xg, wg = np.polynomial.legendre.leggauss(points)
        edges, zeros = _panel_edges(r, nu, a, cfg.max_panels)
        lo, hi = edges[:-1], edges[1:]
        nodes = (0.5 * (hi - lo))[:, None] * xg[None, :] + (0.5 * (hi + lo))[:, None]
        vals = integrand(nodes.ravel()).reshape(nodes.shape)
        pieces = (0.5 * (hi - lo)) * (vals @ wg)
        cum = np.cumsum(pieces)
        # partial sums at Bessel zeros beyond the symbol scale
        idx = np.searchsorted(hi, zeros[zeros > 4 * a], side="right") - 1
        idx = idx[idx >= 0]
        sums = cum[idx]
        if sums.size == 0:
            sums = cum[-3:]
        return _wynn(sums[-min(sums.size, 40):])

    v, err = integrate(cfg.panel_points)
    if refine:
        v2, e2 = integrate(2 * cfg.panel_points)
        err = max(e2, abs(v2 - v))
        v = v2
    tail = math.fsum(b * _potential_kernel(e, a, d, r) for e, b in basis)
    value = v + tail
    scale = max(abs(value), 1e-300)
    if not math.isfinite(value) or err > 1e-3 * scale:
        raise OracleConvergenceError("Fourier inversion did not converge", err / scale)
    return (value, err) if return_error else value


def _end_piece(term, edge, side):
    """int of a residue term c R^{-z} (const + log coefficient ln R) dR/R beyond edge."""
    z = -term.power_of_r
    L = math.log(edge)
    w = edge ** (-z)
    if side == "left":  # int_0^edge, z < 0
        return w * (term.coeff_const / -z + term.coeff_log * (L / -z - 1 / z ** 2))
    return w * (term.coeff_const / z + term.coeff_log * (L / z + 1 / z ** 2))


def radial_mass(params: KernelParams, lo: float = 1e-3, hi: float = 1e4,
                n_poles: int = 12) -> float:
    """int p(1, x) dx over R^d for gamma = 0 by radial quadrature of the kernel.

    With t = 1 the integral equals int_0^inf HH(R) dR/R / (beta Gamma(d/2)).
    The pieces below lo and above hi come from the residue expansions.
    """
    p = params
    if p.gamma != 0:
        raise ValueError("radial_mass needs gamma = 0")
    spec = kernel_h_spec(p)
    lattice = foxh.pole_lattice(spec, n_poles)
    if not lattice.right_poles:
        # no algebraic tail: the stretched-exponential decay sets in late
        hi = max(hi, 1e6)
    middle, _ = quad(lambda u: h_sigma_gamma(p, 0, math.exp(u)).value,
                     math.log(lo), math.log(hi), limit=400, epsabs=0, epsrel=1e-10)
    # the residue expansions are in rho = arg_scale * R
    c = spec.arg_scale
    left = math.fsum(_end_piece(foxh.residue_term(spec, pl), c * lo, "left")
                     for pl in lattice.left_poles[:n_poles])
    right = -math.fsum(_end_piece(foxh.residue_term(spec, pl), c * hi, "right")
                       for pl in lattice.right_poles[:n_poles])
    return (middle + spec.scale * (left + right)) / (p.beta * math.gamma(p.d / 2))
