"""
Brute-force checks of the witness contract
==========================================

Dense matrices at small n: every family stays non-negative on random
product states, and the three-setting witnesses dominate the fidelity
witnesses they are built from (2 W_eff - W_fid >= 0).
"""

# %%
import math

import numpy as np

from ghz_witness import Family
from ghz_witness import oracle

n = 3
states = oracle.random_product_states(n, 20_000, seed=1)

# %%
for fam in Family:
    w = oracle.witness_matrix(fam, 0.5, 1.3, n)
    values = np.einsum("si,ij,sj->s", states.conj(), w, states).real
    print(f"{fam.value:20s} min over product states {values.min():+.4f}   min eigenvalue {oracle.min_eigenvalue(w):+.4f}")

# %%
worst = min(
    oracle.min_eigenvalue(oracle.dominance_operator(fam, theta, phi, 4))
    for fam in (Family.EFFICIENT_PHI, Family.EFFICIENT_PHI_THETA)
    for theta in np.linspace(0, math.pi / 2, 9)
    for phi in np.linspace(-math.pi, math.pi, 9)
)
print(f"smallest eigenvalue of 2 W_eff - W_fid over the grid: {worst:.2e}")
