"""General Fox H-function engine.

H^{mn}_{nu mu}(r) = (1/2 pi i) int_L calH(z) r^{-z} dz with

    calH(z) = prod_{j<=m} G(d_j + delta_j z) prod_{j<=n} G(1 - c_j - gamma_j z)
              / prod_{j>n} G(c_j + gamma_j z) prod_{j>m} G(1 - d_j - delta_j z)

Evaluation routes: the residue series over the left (or right) pole
lattice, and quadrature along a vertical (Bromwich) line.  The Bromwich
route may move its line past poles, in which case the residues of the
crossed poles are added exactly; this is what keeps exponentially small
values and far algebraic tails accurate in double precision.

Pole orders are computed by counting gamma factors whose argument is a
nonpositive integer at the candidate point (numerator minus denominator),
so removable singularities are dropped without special-casing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .complex_gamma import digamma, log_gamma

COINCIDENCE_TOL = 1e-10
MAX_TERMS = 200
DEFAULT_TOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class SpecValidationError(ValueError):
    """Parameter set violates positivity or pole separation."""


class UnsupportedConfiguration(ValueError):
    """Requested evaluation is outside what the engine supports."""


class ConvergenceError(RuntimeError):
    """A series or quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class HFunctionSpec:
    """Parameters of ``scale * H^{mn}_{nu mu}(arg_scale * r)``.

    ``upper`` holds the (c_j, gamma_j) pairs and ``lower`` the
    (d_j, delta_j) pairs, in the usual order: the first ``n`` upper and the
    first ``m`` lower pairs sit in the numerator.
    """
    m: int
    n: int
    upper: tuple = ()
    lower: tuple = ()
    scale: float = 1.0
    arg_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple((float(c), float(g)) for c, g in self.upper))
        object.__setattr__(self, "lower", tuple((float(d), float(g)) for d, g in self.lower))

    @property
    def nu(self):
        return len(self.upper)

    @property
    def mu(self):
        return len(self.lower)

    def factors(self):
        """Gamma factors as (a, b, sign): Gamma(a + b z) ** sign."""
        out = []
        for j, (d, dl) in enumerate(self.lower):
            if j < self.m:
                out.append((d, dl, 1))
            else:
                out.append((1.0 - d, -dl, -1))
        for j, (c, g) in enumerate(self.upper):
            if j < self.n:
                out.append((1.0 - c, -g, 1))
            else:
                out.append((c, g, -1))
        return out


@dataclass(frozen=True)
class DerivedConstants:
    alpha_star: float
    Lambda: float
    omega: float
    eta: float


@dataclass(frozen=True)
class Pole:
    location: float
    order: int
    sources: tuple = ()


@dataclass(frozen=True)
class PoleLattice:
    left_poles: tuple
    right_poles: tuple

    @property
    def window(self):
        lo = self.left_poles[0].location if self.left_poles else -math.inf
        hi = self.right_poles[0].location if self.right_poles else math.inf
        return lo, hi


@dataclass(frozen=True)
class ContourSpec:
    kind: str = "bromwich"
    ell: float = 0.0
    height: float = 0.0
    step: float = 1.0


@dataclass(frozen=True)
class LogPolynomialTerm:
    """(coeff_const + coeff_log * ln r) * r ** power_of_r."""
    power_of_r: float
    coeff_const: float
    coeff_log: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return (self.coeff_const + self.coeff_log * np.log(r)) * r ** self.power_of_r

    def log_abs(self, r):
        """log of an upper bound on |term(r)|, safe against overflow."""
        mag = abs(self.coeff_const) + abs(self.coeff_log) * abs(math.log(r))
        if mag == 0.0:
            return -math.inf
        if not math.isfinite(mag):
            return math.inf
        return math.log(mag) + self.power_of_r * math.log(r)


@dataclass
class EvalResult:
    value: float
    abs_error_estimate: float
    method: str
    ell: Optional[float] = None
    crossed: int = 0
    flags: list = field(default_factory=list)
    log_abs: Optional[float] = None

    def __post_init__(self):
        # log|value|, kept finite when value itself under- or overflows
        if self.log_abs is None:
            self.log_abs = math.log(abs(self.value)) if self.value != 0 else -math.inf


# ---------------------------------------------------------------- validation

def validate(spec: HFunctionSpec):
    """Raise SpecValidationError naming the first violated condition."""
    if not (0 <= spec.m <= spec.mu):
        raise SpecValidationError(f"need 0 <= m <= mu, got m={spec.m}, mu={spec.mu}")
    if not (0 <= spec.n <= spec.nu):
        raise SpecValidationError(f"need 0 <= n <= nu, got n={spec.n}, nu={spec.nu}")
    for j, (_, g) in enumerate(spec.upper):
        if not g > 0:
            raise SpecValidationError(f"gamma_{j + 1} = {g} must be positive")
    for j, (_, dl) in enumerate(spec.lower):
        if not dl > 0:
            raise SpecValidationError(f"delta_{j + 1} = {dl} must be positive")
    if not (spec.scale == spec.scale and spec.arg_scale > 0):
        raise SpecValidationError("arg_scale must be positive")
    left = max((-d / dl for d, dl in spec.lower[:spec.m]), default=-math.inf)
    right = min(((1.0 - c) / g for c, g in spec.upper[:spec.n]), default=math.inf)
    if not left < right:
        raise SpecValidationError(
            f"pole separation fails: max(-d_j/delta_j) = {left} >= min((1-c_j)/gamma_j) = {right}")
    return True


def derived_constants(spec: HFunctionSpec) -> DerivedConstants:
    up_n = spec.upper[:spec.n]
    up_rest = spec.upper[spec.n:]
    lo_m = spec.lower[:spec.m]
    lo_rest = spec.lower[spec.m:]
    alpha_star = (sum(g for _, g in up_n) - sum(g for _, g in up_rest)
                  + sum(d for _, d in lo_m) - sum(d for _, d in lo_rest))
    Lam = (sum(d for d, _ in spec.lower) - sum(c for c, _ in spec.upper)
           + 0.5 * (spec.nu - spec.mu))
    omega = sum(d for _, d in spec.lower) - sum(g for _, g in spec.upper)
    log_eta = (-sum(g * math.log(g) for _, g in spec.upper)
               + sum(d * math.log(d) for _, d in spec.lower))
    return DerivedConstants(alpha_star, Lam, omega, math.exp(log_eta))


# ---------------------------------------------------------------- poles

def _singular_index(u):
    """n if u is (within tolerance) the nonpositive integer -n, else None."""
    k = round(u)
    if k <= 0 and abs(u - k) < COINCIDENCE_TOL:
        return -k
    return None


def pole_order(spec: HFunctionSpec, z0: float) -> int:
    order = 0
    for a, b, s in spec.factors():
        if _singular_index(a + b * z0) is not None:
            order += s
    return order


def _candidates(spec, side, lo, hi):
    """Candidate pole locations of the given side inside [lo, hi]."""
    pts = []
    for idx, (a, b, s) in enumerate(spec.factors()):
        if s != 1:
            continue
        if side == "left" and b < 0 or side == "right" and b > 0:
            continue
        # a + b z = -k  ->  z = -(a + k) / b
        if b > 0:
            k_lo = max(0, math.ceil(-a - b * hi - 1e-9))
            k_hi = math.floor(-a - b * lo + 1e-9) if lo > -math.inf else None
        else:
            k_lo = max(0, math.ceil(-a - b * lo - 1e-9))
            k_hi = math.floor(-a - b * hi + 1e-9) if hi < math.inf else None
        if k_hi is None:
            raise ValueError("unbounded candidate range")
        for k in range(k_lo, k_hi + 1):
            z = -(a + k) / b
            if lo - 1e-12 <= z <= hi + 1e-12:
                pts.append((z, idx))
    return pts


def _merge(spec, pts, reverse):
    pts.sort(key=lambda p: p[0], reverse=reverse)
    poles = []
    i = 0
    while i < len(pts):
        z0, grp = pts[i][0], [pts[i][1]]
        j = i + 1
        while j < len(pts) and abs(pts[j][0] - z0) < COINCIDENCE_TOL:
            grp.append(pts[j][1])
            j += 1
        order = pole_order(spec, z0)
        if order > 2:
            raise UnsupportedConfiguration(f"pole of order {order} at z={z0}")
        if order >= 1:
            poles.append(Pole(z0, order, tuple(grp)))
        i = j
    return poles


def poles_between(spec: HFunctionSpec, lo: float, hi: float, side: str):
    """Poles of the given lattice side inside [lo, hi], sorted away from the window."""
    return _merge(spec, _candidates(spec, side, lo, hi), reverse=(side == "left"))


def _side_slopes(spec, side):
    return [abs(b) for a, b, s in spec.factors()
            if s == 1 and ((b > 0) if side == "left" else (b < 0))]


def pole_lattice(spec: HFunctionSpec, depth: int) -> PoleLattice:
    """First ``depth`` left and right poles (cancelled points excluded)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    sides = {}
    for side in ("left", "right"):
        slopes = _side_slopes(spec, side)
        if not slopes:
            sides[side] = ()
            continue
        if side == "left":
            start = max(-(a / b) for a, b, s in spec.factors() if s == 1 and b > 0)
        else:
            start = min(-(a / b) for a, b, s in spec.factors() if s == 1 and b < 0)
        span = (depth + 2) / min(slopes)
        poles = []
        for _ in range(8):
            lo, hi = (start - span, start + 1e-9) if side == "left" else (start - 1e-9, start + span)
            poles = poles_between(spec, lo, hi, side)
            if len(poles) >= depth:
                break
            span *= 2
        sides[side] = tuple(poles[:depth])
    return PoleLattice(sides["left"], sides["right"])


# ---------------------------------------------------------------- residues

def residue_term(spec: HFunctionSpec, pole) -> LogPolynomialTerm:
    """Residue of calH(z) r^{-z} at a pole, as a log-polynomial in r.

    Near the pole calH = zeta^{-p} C F(zeta) G(zeta) with G even, G(0) = 1,
    so a double pole contributes C F(0) r^{-z0} (F'(0)/F(0) - ln r).
    """
    z0 = pole.location if isinstance(pole, Pole) else float(pole)
    p = pole_order(spec, z0)
    if p <= 0:
        return LogPolynomialTerm(-z0, 0.0, 0.0)
    if p > 2:
        raise UnsupportedConfiguration(f"pole of order {p} at z={z0}")
    C = 1.0
    log_f = 0.0 + 0.0j
    dlog_f = 0.0
    regular_args, regular_meta = [], []
    for a, b, s in spec.factors():
        u0 = a + b * z0
        nidx = _singular_index(u0)
        if nidx is None:
            regular_args.append(u0)
            regular_meta.append((b, s))
            continue
        sgn = -1.0 if nidx % 2 else 1.0
        lg = math.lgamma(1 + nidx)
        psi = float(digamma(1.0 + nidx).real)
        if s == 1:
            C /= b
            C *= sgn
            log_f -= lg
            dlog_f += b * psi
        else:
            C *= b
            C *= sgn
            log_f += lg
            dlog_f -= b * psi
    if regular_args:
        u = np.array(regular_args, dtype=complex)
        lg = log_gamma(u)
        sg = np.array([s for _, s in regular_meta])
        bs = np.array([b for b, _ in regular_meta])
        log_f += np.sum(sg * lg)
        if p == 2:
            dlog_f += float(np.sum(sg * bs * digamma(u).real))
    with np.errstate(over="ignore"):
        F0 = C * math.cos(log_f.imag) * np.exp(log_f.real)
    if p == 1:
        return LogPolynomialTerm(-z0, float(F0), 0.0)
    return LogPolynomialTerm(-z0, float(F0 * dlog_f), float(-F0))


def laurent_leading(spec: HFunctionSpec, z0: float):
    """(residue, lim (z - z0)^2 calH(z)) of calH itself at z0."""
    p = pole_order(spec, z0)
    if p <= 0:
        return 0.0, 0.0
    term = residue_term(spec, z0)
    if p == 1:
        return term.coeff_const, 0.0
    return term.coeff_const, -term.coeff_log


# ---------------------------------------------------------------- integrand

def log_calH(spec: HFunctionSpec, z):
    """log calH(z) (imaginary part modulo 2 pi); -inf where calH vanishes."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros(z.shape, dtype=complex)
    for a, b, s in spec.factors():
        acc = acc + s * log_gamma(a + b * z)
    return acc


def calH(spec: HFunctionSpec, z):
    return np.exp(log_calH(spec, z))


def _line_values(spec, rho, ell, t, offset=0.0):
    z = ell + 1j * np.asarray(t, dtype=float)
    return np.exp(log_calH(spec, z) - z * math.log(rho) - offset).real / math.pi


def _panel_sum(spec, rho, ell, h, n_panels, start=0, offset=0.0):
    a = (np.arange(start, start + n_panels) * h)[:, None]
    t = a + 0.5 * h * (_GL_NODES[None, :] + 1.0)
    f = _line_values(spec, rho, ell, t, offset)
    w = 0.5 * h * _GL_WEIGHTS[None, :]
    return (f * w).sum(axis=1), np.abs(f).max(axis=1), (np.abs(f) * w).sum(axis=1)


def _initial_step(spec, rho, ell):
    """Panel width from the phase speed of the integrand where it matters."""
    t = np.linspace(1e-3, _height_floor(spec, ell) + 20.0, 400)
    z = ell + 1j * t
    lv = (log_calH(spec, z) - z * math.log(rho)).real
    live = lv > lv.max() - 40.0
    # d/dt arg of the integrand ~ sum s b ln|a + b z| - ln rho (Stirling)
    speed = np.full(t.shape, -math.log(rho))
    for a, b, s in spec.factors():
        speed = speed + s * b * np.log(np.abs(a + b * z) + 1.0)
    fastest = np.abs(speed[live]).max() if np.any(live) else abs(math.log(rho))
    return float(min(max(t[live].max(), 1.0) / 8.0, 4.0 / (1.0 + fastest)))


def _height_floor(spec, ell):
    return 2.0 + max(abs(a + b * ell) / abs(b) for a, b, _ in spec.factors())


def _line_integral(spec, rho, ell, tol, h0=None, max_refine=5, offset=None):
    """(1/pi) int_0^inf Re[calH(ell+it) rho^{-ell-it}] dt, scaled by e^{-offset}.

    Returns (value, abs_error, l1_mass, offset); the first three are in
    units of e^{offset}, which keeps tiny or huge results representable.
    """
    dc = derived_constants(spec)
    if dc.alpha_star <= 0:
        raise UnsupportedConfiguration("Bromwich contour needs alpha* > 0")
    if offset is None:
        offset = float(_coarse_log_mass(spec, rho, [ell])[0])
        if not np.isfinite(offset):
            offset = 0.0
    if h0 is None:
        h0 = _initial_step(spec, rho, ell)
    t_floor = _height_floor(spec, ell)
    decay = 0.5 * math.pi * dc.alpha_star

    def integrate(h):
        chunk = max(16, int(math.ceil(8.0 / h)))
        total, mass, peak = 0.0, 0.0, 0.0
        start = 0
        while True:
            part, fmax, l1 = _panel_sum(spec, rho, ell, h, chunk, start, offset)
            total += part.sum()
            mass += l1.sum()
            peak = max(peak, fmax.max())
            start += chunk
            T = start * h
            tail = fmax[-1] / decay
            small = tail <= 1e-3 * tol * max(abs(total), 1e-300) + 1e-17 * mass
            # far below the peak the modulus keeps falling, so the floor can be skipped
            if small and (T > t_floor or fmax[-1] < 1e-30 * peak):
                return total, mass, T
            if T > 5000 + t_floor:
                return total, mass, T

    h = h0
    prev, mass, T = integrate(h)
    err = math.inf
    for _ in range(max_refine):
        h *= 0.5
        cur, mass, T = integrate(h)
        err = abs(cur - prev)
        prev = cur
        if err <= tol * max(abs(cur), 1e-300):
            break
    err = err + 1e-16 * mass
    return prev, err, mass, offset


# ---------------------------------------------------------------- abscissa choice

def _coarse_log_mass(spec, rho, ells):
    """Rough log L1-norm of the line integrand for each abscissa."""
    ells = np.asarray(ells, dtype=float)
    u = np.linspace(0.0, 1.0, 49)[1:]
    scale = np.array([_height_floor(spec, e) for e in ells])[:, None]
    t = (u ** 2)[None, :] * (scale + 20.0)
    z = ells[:, None] + 1j * t
    lv = (log_calH(spec, z) - z * math.log(rho)).real
    dt = np.gradient(t, axis=1)
    m = lv.max(axis=1, keepdims=True)
    return (m[:, 0] + np.log(np.sum(np.exp(lv - m) * dt, axis=1)) - math.log(math.pi))


def _strip_candidates(lo, hi, extent):
    if math.isfinite(lo) and math.isfinite(hi):
        return [lo + f * (hi - lo) for f in (0.25, 0.5, 0.75)]
    if math.isfinite(lo):
        steps = [0.5 * 1.3 ** k for k in range(80) if 0.5 * 1.3 ** k <= extent]
        return [lo + s for s in steps]
    if math.isfinite(hi):
        steps = [0.5 * 1.3 ** k for k in range(80) if 0.5 * 1.3 ** k <= extent]
        return [hi - s for s in steps]
    return [0.0]


def default_ell(spec: HFunctionSpec) -> float:
    """Midpoint of the pole-free window, clipped away from its ends."""
    lat = pole_lattice(spec, 1)
    lo, hi = lat.window
    if math.isfinite(lo) and math.isfinite(hi):
        gap = hi - lo
        return min(max(0.5 * (lo + hi), lo + 0.05 * gap), hi - 0.05 * gap)
    if math.isfinite(lo):
        return lo + 0.5
    if math.isfinite(hi):
        return hi - 0.5
    return 0.0


def choose_abscissa(spec: HFunctionSpec, rho: float, max_cross: int = 60):
    """Pick a line abscissa minimising the integrand mass plus crossed residues.

    Returns (ell, crossed_poles, sign) where the H value equals the line
    integral at ell plus ``sign`` times the crossed residues.  The choice is
    from a fixed discrete candidate set, so nearby rho give the same line.
    """
    dc = derived_constants(spec)
    lo, hi = pole_lattice(spec, 1).window
    lr = math.log(rho)
    extent = 4.0 + 2.0 * (max(rho, 1.0 / rho) / dc.eta) ** (1.0 / max(abs(dc.omega), 0.25))
    extent = min(extent, 1e7)
    strips = [((lo, hi), [], 0)]
    lattice = pole_lattice(spec, max_cross + 1)
    if rho >= 1.0 and math.isfinite(hi):
        poles, sign = list(lattice.right_poles), -1
    elif rho < 1.0 and math.isfinite(lo):
        poles, sign = list(lattice.left_poles), 1
    else:
        poles, sign = [], 0
    # a short list means the lattice on that side is exhausted
    exhausted = len(poles) <= max_cross
    for k, pl in enumerate(poles[:max_cross]):
        if k + 1 < len(poles):
            nxt = poles[k + 1].location
        else:
            nxt = math.inf * -sign if exhausted else pl.location - sign
        edges = (pl.location, nxt) if sign < 0 else (nxt, pl.location)
        strips.append((edges, poles[:k + 1], sign))

    cand_ell, cand_idx = [], []
    for i, ((a, b), _, _) in enumerate(strips):
        for e in _strip_candidates(a, b, extent):
            cand_ell.append(e)
            cand_idx.append(i)
    masses = _coarse_log_mass(spec, rho, cand_ell)

    res_log = []
    acc = -math.inf
    cum = [acc]
    all_crossed = strips[-1][1] if len(strips) > 1 else []
    for pl in all_crossed:
        term = residue_term(spec, pl)
        acc = np.logaddexp(acc, term.log_abs(rho))
        cum.append(acc)
        res_log.append(acc)
    best = None
    for e, i, lm in zip(cand_ell, cand_idx, masses):
        if not np.isfinite(lm):
            continue
        tot = float(np.logaddexp(lm, cum[len(strips[i][1])]))
        if best is None or tot < best[0] - 1e-9:
            best = (tot, e, i)
    if best is None:
        return default_ell(spec), [], 0
    _, e, i = best
    a, b = strips[i][0]
    edge = a if math.isfinite(a) else b
    if not (math.isfinite(a) and math.isfinite(b)) and abs(e - edge) > 8.0:
        # sharp real saddles need a finer abscissa than the geometric grid
        lo_e, hi_e = sorted((edge + (e - edge) / 1.3, edge + (e - edge) * 1.3))
        opt = minimize_scalar(lambda v: float(_coarse_log_mass(spec, rho, [v])[0]),
                              bounds=(lo_e, hi_e), method="bounded",
                              options={"xatol": 1e-3 * abs(e - edge)})
        if opt.fun < best[0]:
            e = float(opt.x)
    return e, strips[i][1], strips[i][2]


# ---------------------------------------------------------------- evaluation routes

def _rho(spec, r):
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return spec.arg_scale * r


def eval_residue_series(spec: HFunctionSpec, r: float, tol: float = DEFAULT_TOL,
                        max_terms: int = MAX_TERMS) -> EvalResult:
    """Sum residues over the lattice the contour theorem selects."""
    rho = _rho(spec, r)
    dc = derived_constants(spec)
    if dc.omega > 0 or (dc.omega == 0 and rho < dc.eta):
        side, sign = "left", 1.0
    elif dc.omega < 0 or (dc.omega == 0 and rho > dc.eta):
        side, sign = "right", -1.0
    else:
        raise UnsupportedConfiguration("omega = 0 and r = eta: no convergent series")
    lattice = pole_lattice(spec, max_terms)
    poles = lattice.left_poles if side == "left" else lattice.right_poles
    total = 0.0
    absmass = 0.0
    small = 0
    last = []
    for k, pl in enumerate(poles):
        term = residue_term(spec, pl)
        if term.log_abs(rho) > 700:
            raise ConvergenceError("residue terms overflow; use the Bromwich route")
        v = sign * float(term(rho))
        total += v
        absmass += abs(v)
        last.append(abs(v))
        if abs(v) < tol * abs(total):
            small += 1
            if small >= 3:
                err = sum(last[-3:]) + 1e-16 * absmass * (k + 1) ** 0.5
                return EvalResult(spec.scale * total, abs(spec.scale) * err, "residue_series")
        else:
            small = 0
    if not poles:
        return EvalResult(0.0, 0.0, "residue_series")
    if len(poles) < max_terms and last and last[-1] == 0.0:
        return EvalResult(spec.scale * total, 0.0, "residue_series")
    raise ConvergenceError(f"residue series did not converge in {len(poles)} terms")


def eval_bromwich(spec: HFunctionSpec, r: float, tol: float = DEFAULT_TOL,
                  ell: Optional[float] = None) -> EvalResult:
    """Quadrature along Re z = ell.

    ``ell`` defaults to the middle of the pole-free window.  An abscissa
    outside the window is allowed: the residues of the poles between the
    window and the line are added exactly.
    """
    rho = _rho(spec, r)
    dc = derived_constants(spec)
    if dc.alpha_star <= 0:
        raise UnsupportedConfiguration("Bromwich contour needs alpha* > 0")
    if ell is None:
        ell = default_ell(spec)
    lo, hi = pole_lattice(spec, 1).window
    crossed, sign = [], 0
    if ell >= hi:
        crossed, sign = poles_between(spec, hi - 1e-9, ell, "right"), -1
    elif ell <= lo:
        crossed, sign = poles_between(spec, ell, lo + 1e-9, "left"), 1
    for pl in crossed:
        if abs(pl.location - ell) < 1e-8:
            raise ValueError(f"abscissa {ell} sits on a pole")
    return _bromwich_with(spec, rho, tol, ell, crossed, sign)


def _bromwich_with(spec, rho, tol, ell, crossed, sign):
    val, err, mass, off = _line_integral(spec, rho, ell, tol)
    lr = math.log(rho)
    res_sum = 0.0
    res_abs = 0.0
    for pl in crossed:
        term = residue_term(spec, pl)
        v = (term.coeff_const + term.coeff_log * lr) * math.exp(term.power_of_r * lr - off)
        res_sum += v
        res_abs += abs(v) * (1e-9 if pl.order == 2 else 1e-15)
    total = val + sign * res_sum
    err = err + res_abs
    if total == 0.0:
        return EvalResult(0.0, abs(spec.scale) * err * float(np.exp(off)), "bromwich",
                          ell=ell, crossed=len(crossed))
    log_abs = math.log(abs(total)) + off + math.log(abs(spec.scale))
    with np.errstate(over="ignore", under="ignore"):
        value = math.copysign(float(np.exp(log_abs)), spec.scale * total)
        abs_err = abs(spec.scale) * err * float(np.exp(off))
    return EvalResult(value, abs_err, "bromwich", ell=ell, crossed=len(crossed), log_abs=log_abs)


def eval_shifted(spec: HFunctionSpec, r: float, tol: float = DEFAULT_TOL) -> EvalResult:
    """Bromwich quadrature on an automatically placed line."""
    rho = _rho(spec, r)
    ell, crossed, sign = choose_abscissa(spec, rho)
    return _bromwich_with(spec, rho, tol, ell, crossed, sign)


def eval(spec: HFunctionSpec, r: float, tol: float = DEFAULT_TOL) -> EvalResult:
    """Evaluate H(r), preferring the residue series where it converges fast."""
    rho = _rho(spec, r)
    dc = derived_constants(spec)
    use_series = ((dc.omega > 0 and rho <= dc.eta / 2) or (dc.omega < 0 and rho >= 2 * dc.eta)
                  or (dc.omega == 0 and (rho <= dc.eta / 2 or rho >= 2 * dc.eta)))
    if use_series:
        try:
            res = eval_residue_series(spec, r, tol)
            if res.abs_error_estimate <= max(tol, 1e-13) * max(abs(res.value), 1e-300) * 10:
                return res
        except ConvergenceError:
            pass
    if dc.alpha_star <= 0:
        return eval_residue_series(spec, r, tol)
    return eval_shifted(spec, r, tol)


def eval_many(spec: HFunctionSpec, r: Sequence[float], tol: float = DEFAULT_TOL):
    return np.array([eval(spec, float(x), tol).value for x in np.atleast_1d(r)])


# ---------------------------------------------------------------- vectorised fixed line

def bromwich_fixed_line(spec: HFunctionSpec, r, ell: Optional[float] = None,
                        height: Optional[float] = None, h: Optional[float] = None):
    """Vectorised Bromwich quadrature for many r on one shared line.

    The gamma products are evaluated once and reused for every r, which
    makes this the fast path for tables over moderate r-ranges.  No
    refinement is done; callers choose ``h`` and ``height``.
    """
    rho = spec.arg_scale * np.atleast_1d(np.asarray(r, dtype=float))
    dc = derived_constants(spec)
    if ell is None:
        ell = default_ell(spec)
    lr = np.log(rho)
    if h is None:
        h = min(0.5, 4.0 / (1.0 + np.abs(lr).max()))
    if height is None:
        height = _height_floor(spec, ell) + 30.0 / max(dc.alpha_star, 0.05)
    n_panels = int(math.ceil(height / h))
    a = (np.arange(n_panels) * h)[:, None]
    t = (a + 0.5 * h * (_GL_NODES[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * h * _GL_WEIGHTS, n_panels)
    z = ell + 1j * t
    lh = log_calH(spec, z)
    keep = lh.real > -745.0
    z, lh, w = z[keep], lh[keep], w[keep]
    vals = np.empty(lr.size)
    for i in range(0, lr.size, 256):
        blk = lr[i:i + 256]
        vals[i:i + 256] = np.exp(lh[None, :] - z[None, :] * blk[:, None]).real @ w
    return spec.scale * vals / math.pi


# ---------------------------------------------------------------- asymptotics

def augmented_spec(spec: HFunctionSpec) -> HFunctionSpec:
    """Parameters of the H function in d/dr H(r) = -r^{-1} H_aug(r)."""
    return replace(spec, m=spec.m + 1, upper=spec.upper + ((0.0, 1.0),),
                   lower=((1.0, 1.0),) + spec.lower)


def tail_expansion(spec: HFunctionSpec, r: float, p: int):
    """Opposite-side residue expansion through the (p+1)-th pole.

    For omega > 0 this is the large-r algebraic expansion, for omega < 0 the
    small-r one.  Returns (value, remainder_exponent); the remainder is
    O(r^-M) (resp. O(r^M)) for every M below the returned exponent.
    """
    dc = derived_constants(spec)
    if dc.alpha_star <= 0:
        raise UnsupportedConfiguration("tail expansion needs alpha* > 0")
    rho = _rho(spec, r)
    lat = pole_lattice(spec, p + 2)
    if dc.omega > 0:
        poles, sign = lat.right_poles, -1.0
    elif dc.omega < 0:
        poles, sign = lat.left_poles, 1.0
    else:
        raise UnsupportedConfiguration("tail expansion needs omega != 0")
    if len(poles) < p + 1:
        raise ValueError(f"only {len(poles)} poles on that side; p={p} too large")
    value = sum(sign * float(residue_term(spec, pl)(rho)) for pl in poles[:p + 1])
    nxt = poles[p + 1].location if len(poles) > p + 1 else math.inf
    return spec.scale * value, abs(nxt)


def exp_decay_envelope(spec: HFunctionSpec, r: float) -> float:
    """log of the exponential envelope of H^{m0}(r) as r -> infinity."""
    dc = derived_constants(spec)
    if spec.n != 0:
        raise UnsupportedConfiguration("exponential envelope needs n = 0 (empty right lattice)")
    if dc.alpha_star <= 0 or dc.omega <= 0:
        raise UnsupportedConfiguration("exponential envelope needs alpha* > 0 and omega > 0")
    rho = _rho(spec, r)
    tail = sum(dl for _, dl in spec.lower[spec.m:])
    c = math.cos((dc.alpha_star + tail) / dc.omega * math.pi)
    out = (dc.Lambda + 0.5) / dc.omega * math.log(rho) + c * dc.omega * (rho / dc.eta) ** (1.0 / dc.omega)
    return out + math.log(abs(spec.scale))
