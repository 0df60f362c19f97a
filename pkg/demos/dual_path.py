"""Fourier inversion against the Mellin-Barnes kernel for a subdiffusive case."""
import numpy as np

from foxkernel.kernel import KernelParams, SpaceTimePoint, p_eval
from foxkernel.oracle import p_via_inversion

p = KernelParams(2, 0.5, 1.0, 0.5, 0.0)
print("M          mellin-barnes           fourier                 rel diff")
for M in np.geomspace(0.1, 10.0, 6):
    pt = SpaceTimePoint(1.0, (M ** (1 / (2 * p.beta)), 0.0))
    a, b = p_eval(p, pt), p_via_inversion(p, pt)
    print(f"{M:<10.4g} {a:<23.16e} {b:<23.16e} {abs(a - b) / abs(a):.1e}")
