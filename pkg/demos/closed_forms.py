"""Heat and Cauchy kernels reproduced by the Mellin-Barnes evaluator."""
import math

import numpy as np

from foxkernel.kernel import KernelParams, SpaceTimePoint, p_eval_full


def heat(d, t, r):
    return (4 * math.pi * t) ** (-d / 2) * math.exp(-r * r / (4 * t))


def cauchy(d, t, r):
    return math.gamma((d + 1) / 2) * math.pi ** (-(d + 1) / 2) * t * (t * t + r * r) ** (-(d + 1) / 2)


def main():
    print(f"{'kernel':>7} {'d':>2} {'|x|':>8} {'p_eval':>22} {'rel err':>9}  method")
    for name, beta, ref in (("heat", 1.0, heat), ("cauchy", 0.5, cauchy)):
        for d in (1, 2, 3):
            p = KernelParams(d, 1.0, beta)
            for r in np.geomspace(0.05, 5.0, 4):
                res = p_eval_full(p, SpaceTimePoint(1.0, (r,) + (0.0,) * (d - 1)))
                exact = ref(d, 1.0, r)
                print(f"{name:>7} {d:>2} {r:8.3f} {res.value:22.15e} "
                      f"{abs(res.value - exact) / exact:9.1e}  {res.method}")


if __name__ == "__main__":
    main()
