"""E_{alpha}(-r) across the series, expansion and Mellin-Barnes branches."""
import numpy as np

from foxkernel.mittag_leffler import ml_eval

r = np.geomspace(1e-2, 1e3, 11)
alphas = (0.3, 0.5, 0.9, 1.0, 1.5, 1.9)
print("r          " + "".join(f"a={a:<14}" for a in alphas))
for x in r:
    print(f"{x:<10.3g} " + "".join(f"{ml_eval(a, 1.0, x):<16.8e}" for a in alphas))
