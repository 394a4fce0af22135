"""Brute-force dense-matrix reference computations for small ``n``.

Everything here builds explicit ``2**n`` vectors and ``2**n x 2**n``
matrices, independently of the closed forms in :mod:`ghz_witness.states`
and :mod:`ghz_witness.witness`.  States are plain numpy arrays: a 1-d array
is a statevector, a 2-d array a density matrix.
"""
from __future__ import annotations

import math
from functools import reduce

import numpy as np
from scipy.stats import unitary_group

from .pauli import MAX_DENSE_QUBITS, SizeLimitError
from .states import PreparedState
from .witness import Family, schmidt_bound

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_size(n: int):
    if n > MAX_DENSE_QUBITS:
        raise SizeLimitError(f"dense simulation is capped at {MAX_DENSE_QUBITS} qubits, got {n}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.ones((1, 1), dtype=complex))


def pauli_string(label: str) -> np.ndarray:
    return kron_all(_PAULI[c] for c in label)


def ghz_vector(n: int) -> np.ndarray:
    return psi_vector(n, math.pi / 4, 0.0)


def psi_vector(n: int, theta: float, phi: float) -> np.ndarray:
    """``cos(theta)|0..0> + exp(i phi) sin(theta)|1..1>``."""
    _check_size(n)
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = math.cos(theta)
    v[-1] = np.exp(1j * phi) * math.sin(theta)
    return v


def density(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def prepared_density(state: PreparedState) -> np.ndarray:
    """Dense ``(1 - p)|Psi><Psi| + p I / 2**n``."""
    n = state.n
    _check_size(n)
    rho = (1 - state.p) * density(psi_vector(n, state.theta, state.phi))
    return rho + state.p * np.eye(2 ** n) / 2 ** n


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Global-phase-insensitive overlap ``|<a|b>|**2`` of two statevectors."""
    return float(abs(np.vdot(a, b)) ** 2)


def first_qubit_unitary(theta: float, phi: float) -> np.ndarray:
    """A unitary sending ``|0>`` to ``cos(theta)|0> + exp(i phi) sin(theta)|1>``."""
    c, s, e = math.cos(theta), math.sin(theta), np.exp(1j * phi)
    return np.array([[c, -np.conj(e) * s], [e * s, c]], dtype=complex)


def phase_gate(phi: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def apply_single(state: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 gate on 1-based ``qubit`` of a statevector."""
    psi = state.reshape([2] * n)
    psi = np.moveaxis(np.tensordot(gate, psi, axes=([1], [qubit - 1])), 0, qubit - 1)
    return psi.reshape(-1)


def apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    psi = state.reshape([2] * n).copy()
    idx1 = [slice(None)] * n
    idx1[control - 1] = 1
    sub = psi[tuple(idx1)]
    t_axis = target - 1 if target < control else target - 2
    psi[tuple(idx1)] = np.flip(sub, axis=t_axis).copy()
    return psi.reshape(-1)


def circuit_state(n: int, theta: float, phi_first: float, final_phases=None) -> np.ndarray:
    """Statevector of the noisy GHZ preparation circuit.

    ``|0..0>``, then a rotation of qubit 1 to ``cos t|0> + e^{i phi} sin t|1>``,
    then CNOTs (1,2), (2,3), ..., (n-1,n), then optional per-qubit phase gates
    ``diag(1, exp(i final_phases[j]))``.
    """
    _check_size(n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    psi = apply_single(psi, first_qubit_unitary(theta, phi_first), 1, n)
    for q in range(1, n):
        psi = apply_cnot(psi, q, q + 1, n)
    if final_phases is not None:
        if len(final_phases) != n:
            raise ValueError(f"need {n} final phases, got {len(final_phases)}")
        for q, ph in enumerate(final_phases, start=1):
            psi = apply_single(psi, phase_gate(ph), q, n)
    return psi


def cnot_matrix(n: int, control: int, target: int) -> np.ndarray:
    """Dense CNOT on 1-based qubits, built column by column from basis states."""
    _check_size(n)
    dim = 2 ** n
    U = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[col] = 1
        U[:, col] = apply_cnot(e, control, target, n)
    return U


def cnot_ladder(n: int) -> np.ndarray:
    U = np.eye(2 ** n, dtype=complex)
    for q in range(1, n):
        U = cnot_matrix(n, q, q + 1) @ U
    return U


def diagonal_projector(n: int) -> np.ndarray:
    """``(|0..0><0..0| + |1..1><1..1|) / 2``."""
    _check_size(n)
    Zd = np.zeros((2 ** n, 2 ** n), dtype=complex)
    Zd[0, 0] = Zd[-1, -1] = 0.5
    return Zd


def off_diagonal_ops(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``X_+ = (|0..0><1..1| + h.c.)/2`` and ``X_- = (|0..0><1..1| - h.c.)/(2i)``."""
    _check_size(n)
    E = np.zeros((2 ** n, 2 ** n), dtype=complex)
    E[0, -1] = 1
    return (E + E.conj().T) / 2, (E - E.conj().T) / 2j


def s1_prime_dense(n: int, theta: float, phi: float) -> np.ndarray:
    """Rotated sigma_z of qubit 1 pushed through the CNOT ladder, by matrix products."""
    u1 = kron_all([first_qubit_unitary(theta, phi)] + [_PAULI["I"]] * (n - 1))
    z1 = pauli_string("Z" + "I" * (n - 1))
    L = cnot_ladder(n)
    U = L @ u1
    return U @ z1 @ U.conj().T


def witness_matrix(family: Family, theta: float, phi: float, n: int) -> np.ndarray:
    """Dense witness operator of ``family`` at parameters ``(theta, phi)``.

    ``theta`` is ignored by the phi-only families and both angles by the
    baseline GHZ witness.
    """
    _check_size(n)
    eye = np.eye(2 ** n, dtype=complex)
    if family is Family.BASELINE:
        return 0.5 * eye - density(ghz_vector(n))
    if family is Family.FULL_PHI:
        return 0.5 * eye - density(psi_vector(n, math.pi / 4, phi))
    if family is Family.FULL_PHI_THETA:
        return schmidt_bound(theta) * eye - density(psi_vector(n, theta, phi))
    Zd = diagonal_projector(n)
    if family is Family.EFFICIENT_PHI:
        mx = pauli_string("X" * n)
        my = pauli_string("Y" + "X" * (n - 1))
        return 0.5 * eye - Zd - 0.25 * (math.cos(phi) * mx + math.sin(phi) * my)
    if family is Family.EFFICIENT_PHI_THETA:
        bound = (2 * schmidt_bound(theta) + 1) / 4
        return bound * eye - Zd - 0.25 * s1_prime_dense(n, theta, phi)
    raise ValueError(f"unknown family {family}")


def fidelity_witness_matrix(family: Family, theta: float, phi: float, n: int) -> np.ndarray:
    """Fidelity-based witness that an efficient family is built to dominate."""
    if family is Family.EFFICIENT_PHI:
        return witness_matrix(Family.FULL_PHI, theta, phi, n)
    if family is Family.EFFICIENT_PHI_THETA:
        return witness_matrix(Family.FULL_PHI_THETA, theta, phi, n)
    raise ValueError(f"{family} is not an efficient family")


def dominance_operator(family: Family, theta: float, phi: float, n: int) -> np.ndarray:
    """``2 W_eff - W_fid``; positive semidefinite exactly when the efficient witness is valid."""
    return 2 * witness_matrix(family, theta, phi, n) - fidelity_witness_matrix(family, theta, phi, n)


def trace_expectation(op: np.ndarray, state: np.ndarray) -> float:
    """``Tr(op rho)`` for a statevector or density matrix."""
    if state.ndim == 1:
        if op.shape != (state.size, state.size):
            raise ValueError(f"operator shape {op.shape} does not match state of size {state.size}")
        val = np.vdot(state, op @ state)
    else:
        if op.shape != state.shape:
            raise ValueError(f"operator shape {op.shape} does not match state shape {state.shape}")
        val = np.einsum("ij,ji->", op, state)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3g}; operator not Hermitian?")
    return float(val.real)


def min_eigenvalue(op: np.ndarray) -> float:
    if op.shape[0] > 2 ** MAX_DENSE_QUBITS:
        raise SizeLimitError("operator too large for dense eigendecomposition")
    if not np.allclose(op, op.conj().T, atol=1e-12):
        raise ValueError("operator is not Hermitian")
    return float(np.linalg.eigvalsh(op)[0])


def _haar_qubits(rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_product_state(n: int, seed) -> np.ndarray:
    """Tensor product of ``n`` Haar-random single-qubit pure states."""
    _check_size(n)
    rng = np.random.default_rng(seed)
    return kron_all(_haar_qubits(rng, n)[:, :, None]).reshape(-1)


def random_product_states(n: int, count: int, seed) -> np.ndarray:
    """``(count, 2**n)`` array of independent random product states."""
    _check_size(n)
    rng = np.random.default_rng(seed)
    qubits = _haar_qubits(rng, count * n).reshape(count, n, 2)
    out = qubits[:, 0, :]
    for j in range(1, n):
        out = (out[:, :, None] * qubits[:, j, None, :]).reshape(count, -1)
    return out


def random_local_unitary(n: int, seed) -> np.ndarray:
    """``U_1 x ... x U_n`` with Haar-random single-qubit factors."""
    _check_size(n)
    rng = np.random.default_rng(seed)
    return kron_all(np.reshape(unitary_group.rvs(2, size=n, random_state=rng), (n, 2, 2)))
