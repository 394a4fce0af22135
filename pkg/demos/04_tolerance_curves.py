"""
White-noise tolerance of the four families
==========================================

Closed-form thresholds next to thresholds measured by bisecting the
witness value on exact expectations.  The phi-only families beat the
(phi, theta) ones everywhere except at theta = 0, pi/4, pi/2.
"""

# %%
import math

import numpy as np

from ghz_witness import Family, gap_functions, threshold_by_bisection, tolerance

n = 8
families = (Family.FULL_PHI, Family.FULL_PHI_THETA, Family.EFFICIENT_PHI, Family.EFFICIENT_PHI_THETA)

# %%
print(f"{'theta':>6}" + "".join(f"{f.value:>22}" for f in families) + f"{'g':>8}{'l':>8}")
for theta in np.linspace(0, math.pi / 2, 9):
    cells = []
    for fam in families:
        t = tolerance(fam, theta, n)
        cells.append(f"{t.finite_n:.4f}/{threshold_by_bisection(fam, n, theta):.4f}")
    g, l = gap_functions(theta)
    print(f"{theta:6.3f}" + "".join(f"{c:>22}" for c in cells) + f"{g:8.4f}{l:8.4f}")

# %%
# finite-n thresholds approach the large-n ones quickly
for m in (3, 5, 10, 20):
    t = tolerance(Family.EFFICIENT_PHI_THETA, math.pi / 4, m)
    print(f"n={m:2d}: finite {t.finite_n:.6f}  asymptotic {t.asymptotic:.6f}")
