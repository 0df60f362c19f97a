"""Fitted log-log slopes against the predicted envelope exponents."""
from foxkernel import asymptotics as asy
from foxkernel.kernel import KernelParams

SAMPLES = [
    (KernelParams(2, 1.5, 0.7, 0.3, -0.8), asy.LARGE_M, (1e2, 1e4)),
    (KernelParams(2, 1.7, 0.6, 0.0, -0.6), asy.LARGE_M, (1e2, 1e4)),
    (KernelParams(3, 0.6, 1.0, 0.2, 0.1), asy.SMALL_M, (1e-4, 1e-2)),
    (KernelParams(1, 0.6, 2.0, 0.2, 0.49), asy.SMALL_M, (1e-4, 1e-2)),
]

for p, side, window in SAMPLES:
    case = asy.classify(p, 0, side)
    xs, ts = asy.x_slope(p, 0, window), asy.t_slope(p, 0, window)
    print(f"{case.theorem}({case.case_label}{'/' + case.branch if case.branch else ''}) "
          f"d={p.d} a={p.alpha} b={p.beta} g={p.gamma} s={p.sigma}")
    print(f"    x-slope {xs.slope:+.4f} (predicted {xs.expected:+.4f})   "
          f"t-slope {ts.slope:+.4f} (predicted {ts.expected:+.4f})")

fit = asy.exp_decay_fit(KernelParams(2, 0.5, 1.0))
print(f"exponential case d=2 a=0.5 b=1: ln|p| ~ {fit.rate:.4f} M^(2/3), R^2 = {fit.r_squared:.5f}")
