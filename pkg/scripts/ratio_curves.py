"""Worst-case ratio tables for both problems on a tau grid, as CSV on stdout."""
import sys

import numpy as np

from optirefine.ratio import approx_ratio_curve

taus = np.round(np.arange(0.05, 0.951, 0.05), 4)
print("problem,tau,ratio,gamma,eta")
for problem in ("dskr", "maxcutkr"):
    for p in approx_ratio_curve(problem, taus):
        print(f"{problem},{p.tau:.2f},{p.ratio:.6f},{p.gamma:.4f},{p.eta:.4f}")
    sys.stdout.flush()
