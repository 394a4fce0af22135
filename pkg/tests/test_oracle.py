import math

import numpy as np
import pytest

from ghz_witness import Family, PreparedState, SizeLimitError
from ghz_witness import oracle


def test_circuit_ideal_ghz():
    psi = oracle.circuit_state(3, math.pi / 4, 0.0)
    expected = np.zeros(8)
    expected[0] = expected[-1] = 1 / math.sqrt(2)
    assert np.allclose(psi, expected, atol=1e-12)


def test_circuit_final_phases_absorb_into_phi():
    psi = oracle.circuit_state(2, math.pi / 3, 0.3, [0.1, 0.2])
    target = oracle.psi_vector(2, math.pi / 3, 0.3 + 0.1 + 0.2)
    assert oracle.fidelity(psi, target) == pytest.approx(1.0, abs=1e-12)


def test_circuit_theta_zero():
    psi = oracle.circuit_state(2, 0.0, 0.7)
    assert np.allclose(psi, [1, 0, 0, 0], atol=1e-12)


def test_circuit_phase_count_checked():
    with pytest.raises(ValueError):
        oracle.circuit_state(3, 0.2, 0.1, [0.0, 0.0])


@pytest.mark.parametrize("n", range(2, 11))
def test_circuit_ghz_all_sizes(n):
    assert oracle.fidelity(oracle.circuit_state(n, math.pi / 4, 0.0), oracle.ghz_vector(n)) >= 1 - 1e-12


def test_size_cap():
    with pytest.raises(SizeLimitError):
        oracle.psi_vector(11, 0.1, 0.0)


def test_witness_matrix_examples():
    ghz = oracle.ghz_vector(2)
    full = oracle.witness_matrix(Family.FULL_PHI, math.pi / 4, 0.0, 2)
    assert np.allclose(full, 0.5 * np.eye(4) - oracle.density(ghz))
    eff = oracle.witness_matrix(Family.EFFICIENT_PHI, math.pi / 4, 0.0, 2)
    assert np.allclose(eff, 0.5 * np.eye(4) - oracle.diagonal_projector(2) - 0.25 * oracle.pauli_string("XX"))
    for phi in (-2.0, 0.4, 3.0):
        a = oracle.witness_matrix(Family.FULL_PHI_THETA, math.pi / 4, phi, 3)
        b = oracle.witness_matrix(Family.FULL_PHI, math.pi / 4, phi, 3)
        assert np.allclose(a, b, atol=1e-12)


def test_trace_examples():
    w = oracle.witness_matrix(Family.BASELINE, 0, 0, 4)
    assert oracle.trace_expectation(w, oracle.psi_vector(4, math.pi / 4, math.pi)) == pytest.approx(0.5, abs=1e-12)
    for phi in np.linspace(-math.pi, math.pi, 13):
        val = oracle.trace_expectation(w, oracle.psi_vector(4, math.pi / 4, phi))
        assert val == pytest.approx(-math.cos(phi) / 2, abs=1e-12)
    for n in range(2, 7):
        pmax = 2 ** (n - 1) / (2 ** n - 1)
        rho = oracle.prepared_density(PreparedState.from_angles(n, p=pmax))
        w = oracle.witness_matrix(Family.BASELINE, 0, 0, n)
        assert oracle.trace_expectation(w, rho) == pytest.approx(0.0, abs=1e-12)


def test_trace_rejects_non_hermitian():
    op = np.zeros((2, 2), dtype=complex)
    op[0, 1] = 1j
    with pytest.raises(ValueError):
        oracle.trace_expectation(op, np.array([1, 1]) / math.sqrt(2))


def test_min_eigenvalue():
    assert oracle.min_eigenvalue(np.eye(4)) == pytest.approx(1.0)
    # the two-setting GHZ witness at phi = 0 dominates half the fidelity witness
    w2 = oracle.witness_matrix(Family.EFFICIENT_PHI, math.pi / 4, 0.0, 3)
    w = oracle.witness_matrix(Family.BASELINE, 0, 0, 3)
    assert oracle.min_eigenvalue(2 * w2 - w) >= -1e-10
    with pytest.raises(ValueError):
        oracle.min_eigenvalue(np.array([[0, 1], [0, 0]], dtype=complex))


def test_efficient_operator_inequality_small_grid():
    for theta in np.linspace(0, math.pi / 2, 5):
        for phi in np.linspace(-math.pi, math.pi, 5):
            op = oracle.dominance_operator(Family.EFFICIENT_PHI_THETA, theta, phi, 4)
            assert oracle.min_eigenvalue(op) >= -1e-10


def test_product_state_determinism():
    a = oracle.random_product_state(3, 42)
    b = oracle.random_product_state(3, 42)
    assert np.array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_batched_product_states_are_products():
    states = oracle.random_product_states(3, 50, 7)
    assert states.shape == (50, 8)
    for v in states:
        # rank-one reshaping across every cut
        for cut in (2, 4):
            assert np.linalg.matrix_rank(v.reshape(cut, -1), tol=1e-10) == 1


def test_product_states_respect_ghz_overlap_bound():
    states = oracle.random_product_states(3, 10_000, 3)
    overlaps = np.abs(states @ oracle.ghz_vector(3).conj()) ** 2
    assert overlaps.max() <= 0.5 + 1e-10
    w = oracle.witness_matrix(Family.BASELINE, 0, 0, 3)
    values = np.einsum("si,ij,sj->s", states.conj(), w, states).real
    assert values.min() >= -1e-10


def test_local_unitary_is_unitary_product():
    u = oracle.random_local_unitary(3, 5)
    assert np.allclose(u @ u.conj().T, np.eye(8), atol=1e-12)
    u1 = oracle.random_local_unitary(1, 5)
    assert u1.shape == (2, 2)


def test_fidelity_witness_dispatch():
    a = oracle.fidelity_witness_matrix(Family.EFFICIENT_PHI_THETA, 0.4, 1.0, 3)
    assert np.allclose(a, oracle.witness_matrix(Family.FULL_PHI_THETA, 0.4, 1.0, 3))
    with pytest.raises(ValueError):
        oracle.fidelity_witness_matrix(Family.FULL_PHI, 0.4, 1.0, 3)
