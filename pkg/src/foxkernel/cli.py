"""Command-line front end: ``foxkernel <command> [options]``.

Commands: eval, envelope, regime, selfcheck, oracle-compare.
Exit codes: 0 ok, 1 selfcheck failure, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import subprocess
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import foxh
from .kernel import (InvalidParameters, KernelParams, SpaceTimePoint, p_derivative_full,
                     p_eval_full, similarity_M)

EXIT_OK, EXIT_SELFCHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
CSV_HEADER = "t,x_norm,M,value,abs_err,method,flags"
CONFIG_KEYS = ("d", "alpha", "beta", "gamma", "sigma", "n", "tol", "t_grid", "x_grid",
               "M_grid", "format")
DEFAULTS = {"d": "1", "alpha": "1", "beta": "1", "gamma": "0", "sigma": "0", "n": "0",
            "tol": "1e-10", "t_grid": "1", "x_grid": "1", "M_grid": None, "format": "csv"}


class InputError(ValueError):
    pass


def parse_grid(spec: str) -> list:
    """'a:b:k' gives k log-spaced points from a to b; otherwise a comma list."""
    spec = spec.strip()
    if not spec:
        raise InputError("empty grid")
    try:
        if ":" in spec:
            a, b, k = spec.split(":")
            k = int(k)
            if k < 1 or float(a) <= 0 or float(b) <= 0:
                raise InputError(f"bad grid {spec!r}")
            return [float(v) for v in np.geomspace(float(a), float(b), k)]
        return [float(v) for v in spec.split(",")]
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad grid {spec!r}") from None


def read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            if k not in CONFIG_KEYS:
                raise InputError(f"{path}:{lineno}: unknown key {k!r}")
            out[k] = v
    return out


@dataclass
class RunConfig:
    params: KernelParams
    n: int = 0
    t_grid: list = field(default_factory=lambda: [1.0])
    x_grid: list = field(default_factory=lambda: [1.0])
    M_grid: list | None = None
    tol: float = 1e-10
    format: str = "csv"

    def __post_init__(self):
        if not 1e-14 <= self.tol <= 1e-2:
            raise InputError(f"tol must lie in [1e-14, 1e-2], got {self.tol}")
        if self.format not in ("csv", "json"):
            raise InputError(f"format must be csv or json, got {self.format!r}")
        if self.n < 0:
            raise InputError("n must be nonnegative")
        grids = [self.t_grid, self.x_grid] + ([self.M_grid] if self.M_grid is not None else [])
        if any(len(g) == 0 for g in grids):
            raise InputError("grids must be nonempty")
        if any(v <= 0 for g in grids for v in g):
            raise InputError("grid values must be positive")

    def points(self):
        """(t, |x|, M) triples in emission order."""
        p = self.params
        if self.M_grid is not None:
            for t in self.t_grid:
                for M in self.M_grid:
                    yield t, (M * t ** p.alpha) ** (1.0 / (2 * p.beta)), M
        else:
            for t in self.t_grid:
                for x in self.x_grid:
                    yield t, x, similarity_M(p, t, x)

    def as_dict(self):
        d = asdict(self)
        d["params"] = asdict(self.params)
        return d


def build_config(args) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    cli = {"d": args.d, "alpha": args.alpha, "beta": args.beta, "gamma": args.gamma,
           "sigma": args.sigma, "n": args.n, "tol": args.tol, "t_grid": args.t,
           "x_grid": args.x, "M_grid": args.M, "format": args.format}
    merged.update({k: v for k, v in cli.items() if v is not None})
    try:
        params = KernelParams(int(merged["d"]), float(merged["alpha"]), float(merged["beta"]),
                              float(merged["gamma"]), float(merged["sigma"]))
        cfg = RunConfig(params, int(merged["n"]), parse_grid(merged["t_grid"]),
                        parse_grid(merged["x_grid"]),
                        parse_grid(merged["M_grid"]) if merged["M_grid"] else None,
                        float(merged["tol"]), merged["format"])
    except InvalidParameters as exc:
        raise InputError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from None
    if not params.integrable:
        raise InputError("non-integrable regime: gamma > beta requires alpha = 1 and sigma = 0")
    return cfg


# ---------------------------------------------------------------- output

def _num(v):
    v = float(v)
    return format(v + 0.0 if v == 0 else v, ".17g")


def emit(cfg: RunConfig, columns, rows, summary, out, comments=()):
    if cfg.format == "json":
        doc = {"config": cfg.as_dict(), "rows": [dict(zip(columns, r)) for r in rows],
               "summary": summary}
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    out.write(",".join(columns) + "\n")
    for r in rows:
        out.write(",".join(_num(v) if isinstance(v, (float, int, np.floating)) and
                           not isinstance(v, bool) else str(v) for v in r) + "\n")
    for c in comments:
        out.write(f"# {c}\n")


# ---------------------------------------------------------------- commands

def _evaluate(cfg: RunConfig, t, x):
    d = cfg.params.d
    pt = SpaceTimePoint(t, (x,) + (0.0,) * (d - 1))
    if cfg.n == 0:
        return p_eval_full(cfg.params, pt, cfg.tol)
    return p_derivative_full(cfg.params, pt, (cfg.n,) + (0,) * (d - 1), cfg.tol)


def cmd_eval(cfg: RunConfig, out):
    columns = CSV_HEADER.split(",")
    rows = []
    for t, x, M in cfg.points():
        res = _evaluate(cfg, t, x)
        rows.append((t, x, M, res.value, res.abs_error_estimate, res.method,
                     ";".join(res.flags)))
    emit(cfg, columns, rows, {"points": len(rows)}, out)


def cmd_regime(cfg: RunConfig, out):
    from .asymptotics import LARGE_M, SMALL_M, classify, envelope
    columns = ["side", "theorem", "case", "branch", "applicable", "unverified",
               "x_power", "t_power", "log_factor", "exp_rate"]
    rows = []
    for side in (LARGE_M, SMALL_M):
        c = classify(cfg.params, cfg.n, side)
        if c.applicable:
            e = envelope(cfg.params, cfg.n, side)
            rows.append((side, c.theorem, c.case_label, c.branch or "-", True,
                         c.unverified_flag, e.x_power, e.t_power, e.log_factor, e.exp_rate))
        else:
            rows.append((side, c.theorem, "-", "-", False, False, "nan", "nan", False, "nan"))
    emit(cfg, columns, rows, {}, out)


def cmd_envelope(cfg: RunConfig, out):
    from .asymptotics import (LARGE_M, SMALL_M, classify, envelope, exp_decay_fit,
                              log_branch_fit, ratio_check, t_slope, x_slope)
    Ms = cfg.M_grid
    if Ms is None:
        Ms = sorted({similarity_M(cfg.params, t, x) for t, x, _ in cfg.points()})
    side = LARGE_M if min(Ms) >= 1 else SMALL_M
    if (min(Ms) < 1) != (max(Ms) < 1):
        raise InputError("the M grid must lie on one side of M = 1")
    case = classify(cfg.params, cfg.n, side)
    if not case.applicable:
        raise InputError(f"no regime case applies on the {side} side")
    env = envelope(cfg.params, cfg.n, side)
    rng = (min(Ms), max(Ms))
    report = [("theorem", case.theorem), ("case", case.case_label),
              ("branch", case.branch or "-"), ("unverified", case.unverified_flag),
              ("x_power", env.x_power), ("t_power", env.t_power),
              ("log_factor", env.log_factor), ("exp_rate", env.exp_rate)]
    if env.exp_rate:
        fit = exp_decay_fit(cfg.params, rng)
        report += [("fitted_decay_rate", -fit.rate), ("fit_r_squared", fit.r_squared)]
    elif rng[1] / rng[0] > 1.5:
        xs = x_slope(cfg.params, cfg.n, rng)
        ts = t_slope(cfg.params, cfg.n, rng)
        report += [("fitted_x_slope", xs.slope), ("x_slope_ok", xs.passed),
                   ("fitted_t_slope", ts.slope), ("t_slope_ok", ts.passed)]
        if env.log_factor:
            lf = log_branch_fit(cfg.params, cfg.n, rng)
            report += [("log_coefficient", lf.coeff), ("log_significant", lf.significant)]
    rc = ratio_check(cfg.params, cfg.n, side, Ms)
    report += [("ratio_min", rc.min_ratio), ("ratio_max", rc.max_ratio),
               ("ratio_spread", rc.spread), ("ratio_ok", rc.passed)]
    emit(cfg, ["key", "value"], report, dict(report), out)


def cmd_oracle_compare(cfg: RunConfig, out):
    from .oracle import QuadratureConfig, p_via_inversion
    if cfg.params.d > 4:
        raise InputError("the Fourier oracle supports d <= 4")
    qc = QuadratureConfig(tol=max(cfg.tol, 1e-12))
    columns = ["t", "x_norm", "M", "mellin_value", "oracle_value", "rel_diff"]
    rows = []
    worst = 0.0
    for t, x, M in cfg.points():
        pt = SpaceTimePoint(t, (x,) + (0.0,) * (cfg.params.d - 1))
        mv = p_eval_full(cfg.params, pt, cfg.tol).value
        ov = p_via_inversion(cfg.params, pt, qc)
        rel = abs(mv - ov) / max(abs(mv), 1e-300)
        worst = max(worst, rel)
        rows.append((t, x, M, mv, ov, rel))
    emit(cfg, columns, rows, {"max_rel_diff": worst}, out,
         comments=[f"max_rel_diff={_num(worst)}"])


# ---------------------------------------------------------------- selfcheck

def _quick_suites(tol):
    from . import complex_gamma as cg
    from .kernel import p_eval
    from .oracle import closed_form_reference
    suites = {}

    z = np.array([0.3 + 0.2j, 2.5 - 1.0j, -1.7 + 0.4j, 7.25 + 3.0j])
    rec = np.abs(np.exp(cg.log_gamma(z + 1) - cg.log_gamma(z)) - z) / np.abs(z)
    refl = np.abs(np.exp(cg.log_gamma(z) + cg.log_gamma(1 - z)) * np.sin(np.pi * z) - np.pi) / np.pi
    suites["gamma identities"] = [bool(v < 1e-12) for v in np.concatenate([rec, refl])]

    checks = []
    for d in (1, 2, 3):
        for t in (0.5, 1.0, 2.0):
            for x in (0.05, 0.5, 5.0):
                pt = SpaceTimePoint(t, (x,) + (0.0,) * (d - 1))
                ref = closed_form_reference("gaussian", d, t, x)
                val = p_eval(KernelParams(d, 1.0, 1.0), pt, tol)
                checks.append(abs(val - ref) / ref < max(1e-8, 100 * tol))
    suites["gaussian"] = checks

    checks = []
    for d in (1, 3):
        for t in (0.5, 2.0):
            for x in (0.1, 1.0, 10.0):
                pt = SpaceTimePoint(t, (x,) + (0.0,) * (d - 1))
                ref = closed_form_reference("poisson", d, t, x)
                val = p_eval(KernelParams(d, 1.0, 0.5), pt, tol)
                checks.append(abs(val - ref) / ref < max(1e-6, 100 * tol))
    suites["cauchy"] = checks

    checks = []
    rng = np.random.default_rng(7)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        beta = float(rng.uniform(0.3, 2.0))
        p = KernelParams(d, float(rng.uniform(0.2, 1.8)), beta,
                         float(rng.uniform(0, 1)) * beta, float(rng.uniform(-0.5, 1.0)))
        t, x, lam = float(rng.uniform(0.3, 3)), float(rng.uniform(0.2, 3)), float(rng.uniform(0.5, 2))
        a = p_eval(p, SpaceTimePoint(lam * t, (lam ** (p.alpha / (2 * p.beta)) * x,)
                                     + (0.0,) * (d - 1)), tol)
        b = p_eval(p, SpaceTimePoint(t, (x,) + (0.0,) * (d - 1)), tol)
        expo = -p.sigma - p.alpha * (d + 2 * p.gamma) / (2 * p.beta)
        checks.append(abs(a - lam ** expo * b) <= max(1e-10, 1e3 * tol) * abs(a))
    suites["scaling"] = checks
    return suites


def _find_acceptance():
    here = os.path.dirname(os.path.abspath(__file__))
    for up in (2, 3):
        cand = os.path.join(here, *([".."] * up), "tests", "test_acceptance.py")
        if os.path.exists(cand):
            return os.path.normpath(cand)
    return None


def cmd_selfcheck(level: str, tol: float, out) -> int:
    t0 = time.time()
    suites = _quick_suites(tol)
    failed = 0
    for name, res in suites.items():
        npass = sum(res)
        status = "PASS" if npass == len(res) else "FAIL"
        failed += npass != len(res)
        out.write(f"{status} {name}: {npass}/{len(res)}\n")
    if level == "full":
        path = _find_acceptance()
        if path is None:
            out.write("FAIL acceptance suite: tests/test_acceptance.py not found\n")
            failed += 1
        else:
            proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-s", path],
                                  capture_output=True, text=True)
            lines = [ln for ln in proc.stdout.splitlines()
                     if ln.startswith(("PASS", "FAIL", "XFAIL"))]
            for ln in lines:
                out.write(ln + "\n")
            ok = proc.returncode == 0
            out.write(f"{'PASS' if ok else 'FAIL'} acceptance suite (pytest exit {proc.returncode})\n")
            failed += not ok
    out.write(f"selfcheck {level}: {'all pass' if not failed else f'{failed} suite(s) failed'}"
              f" in {time.time() - t0:.1f} s\n")
    return EXIT_OK if not failed else EXIT_SELFCHECK


# ---------------------------------------------------------------- entry point

def _add_common(sp):
    sp.add_argument("--d", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--n", type=int, help="order of the x_1 derivative")
    sp.add_argument("--t", help="t grid: value, comma list or a:b:k")
    sp.add_argument("--x", help="|x| grid")
    sp.add_argument("--M", help="similarity-variable grid; replaces --x")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--config", help="key=value file; command-line flags take precedence")
    sp.add_argument("--out", help="write output here instead of stdout")


def make_parser():
    ap = argparse.ArgumentParser(prog="foxkernel",
                                 description="Fundamental solutions of space-time fractional "
                                             "diffusion via Fox H-functions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("eval", "evaluate p or a spatial derivative on a grid"),
                        ("envelope", "regime case, envelope exponents and fitted slopes"),
                        ("regime", "regime classification on both sides of M = 1"),
                        ("oracle-compare", "compare with Fourier inversion")):
        _add_common(sub.add_parser(name, help=help_))
    sc = sub.add_parser("selfcheck", help="run the built-in check suites")
    sc.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    sc.add_argument("--tol", type=float, default=1e-10)
    sc.add_argument("--out")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        if args.command == "selfcheck":
            if not 1e-14 <= args.tol <= 1e-2:
                raise InputError(f"tol must lie in [1e-14, 1e-2], got {args.tol}")
            code = cmd_selfcheck(args.level, args.tol, buf)
        else:
            cfg = build_config(args)
            {"eval": cmd_eval, "envelope": cmd_envelope, "regime": cmd_regime,
             "oracle-compare": cmd_oracle_compare}[args.command](cfg, buf)
            code = EXIT_OK
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (foxh.ConvergenceError, foxh.UnsupportedConfiguration, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
