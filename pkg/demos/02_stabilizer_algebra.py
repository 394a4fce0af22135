"""
Generalized stabilizers by Clifford conjugation
================================================

The three-setting witness is built from the first stabilizer of the
GHZ-like state.  We get it symbolically by pushing a rotated sigma_z on
qubit 1 through the CNOT ladder, then check it against dense matrices.
"""

# %%
import math

import numpy as np

from ghz_witness import (
    ObservableSum,
    cnot_conjugate,
    dense_matrix,
    ghz_projectors,
    ghz_stabilizer_generators,
    s1_prime,
)
from ghz_witness import oracle

# %%
# CNOT rules on the control qubit
for label in ("XI", "YI", "ZI", "IZ"):
    print(label, "->", cnot_conjugate(ObservableSum.single(label), 1, 2))

# %%
print("GHZ generators, n=4:", [str(g) for g in ghz_stabilizer_generators(4)])

# %%
# S1' for a few parameter choices; it fixes the circuit output state
for theta, phi in [(math.pi / 4, 0.0), (math.pi / 4, math.pi / 2), (math.pi / 6, 0.0), (0.4, 1.1)]:
    s1 = s1_prime(3, theta, phi)
    psi = oracle.circuit_state(3, theta, phi)
    residual = np.abs(dense_matrix(s1) @ psi - psi).max()
    print(f"theta={theta:.3f} phi={phi:.3f}: {s1}   |S1' psi - psi| = {residual:.1e}")

# %%
# P1 P2 is the GHZ projector, and P2 is twice the diagonal part
p1, p2 = ghz_projectors(4)
ghz = oracle.density(oracle.ghz_vector(4))
print("P1 P2 == |GHZ><GHZ| :", np.allclose(dense_matrix(p1 @ p2), ghz))
print("P2 == 2 Z           :", np.allclose(dense_matrix(p2), 2 * oracle.diagonal_projector(4)))
