import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghz_witness import (
    Estimate,
    Family,
    IncompleteDataError,
    PreparedState,
    Protocol,
    estimate_expectations,
    evaluate,
    exact_expectations,
    gap_functions,
    max_fidelity,
    phi_opt_efficient,
    phi_opt_full,
    sample_protocol,
    schmidt_bound,
    theta_opt_efficient,
    theta_opt_full,
    threshold_by_bisection,
    tolerance,
    white_noise_tolerance,
)
from ghz_witness import oracle

FAMILIES = list(Family)


def exact(n, theta=math.pi / 4, phi=0.0, p=0.0):
    return exact_expectations(PreparedState.from_angles(n, theta, phi, p))


def test_schmidt_bound_range():
    assert schmidt_bound(math.pi / 4) == pytest.approx(0.5)
    for t in np.linspace(0, math.pi / 2, 50):
        assert 0.5 - 1e-15 <= schmidt_bound(t) <= 1.0


def test_phi_opt_examples():
    assert phi_opt_full(exact(4, math.pi / 4, 1.1, 0.3)).value == pytest.approx(1.1, abs=1e-12)
    assert phi_opt_full(exact(4)).value == pytest.approx(0.0, abs=1e-12)
    # sign-flipped GHZ: the angle lands on the closed end of [-pi, pi)
    assert phi_opt_full(exact(4, math.pi / 4, math.pi)).value == pytest.approx(-math.pi, abs=1e-12)


def test_theta_opt_examples():
    for phi in (-2.0, 0.0, 1.5):
        assert theta_opt_full(exact(5, 0.6, phi, 0.25)).value == pytest.approx(0.6, abs=1e-12)
    assert theta_opt_full(exact(4)).value == pytest.approx(math.pi / 4, abs=1e-12)
    product = theta_opt_full(exact(4, 0.0, 0.0, 0.0))
    assert product.value == pytest.approx(0.0, abs=1e-12)
    assert not product.degenerate


def test_degenerate_fallbacks():
    mixed = exact(4, 0.3, 1.0, 1.0)
    for fn, fallback in ((phi_opt_full, 0.0), (phi_opt_efficient, 0.0),
                         (theta_opt_full, math.pi / 4), (theta_opt_efficient, math.pi / 4)):
        est = fn(mixed)
        assert est.degenerate and est.value == fallback
    report = evaluate(Family.FULL_PHI_THETA, mixed)
    assert report.degenerate == ["phi", "theta"]
    assert not report.entangled


def test_phi_degenerate_but_theta_resolved_for_product_state():
    report = evaluate(Family.EFFICIENT_PHI_THETA, exact(3, 0.0))
    assert report.degenerate == ["phi"]
    assert report.theta_opt == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_exact_recovery_grid(n):
    thetas = np.linspace(0, math.pi / 2, 20)
    phis = np.linspace(-math.pi, math.pi, 20, endpoint=False)
    ps = np.linspace(0, 0.95, 10)
    for theta in thetas:
        for phi in phis:
            for p in ps:
                es = exact(n, theta, phi, p)
                assert theta_opt_full(es).value == pytest.approx(theta, abs=1e-10)
                assert theta_opt_efficient(es).value == pytest.approx(theta, abs=1e-10)
                if 0 < theta < math.pi / 2:
                    for fn in (phi_opt_full, phi_opt_efficient):
                        got = fn(es).value
                        assert abs(math.remainder(got - phi, 2 * math.pi)) < 1e-10


def test_max_fidelity_examples():
    assert max_fidelity(exact(4, 0.4, 2.0, 0.0), fit_theta=True) == pytest.approx(1.0, abs=1e-12)
    assert max_fidelity(exact(2, math.pi / 4, 0.7, 0.5)) == pytest.approx(0.625, abs=1e-12)
    for n in (3, 6):
        assert max_fidelity(exact(n, math.pi / 4, -1.0, 0.3)) == pytest.approx(0.7 + 0.3 / 2 ** n, abs=1e-12)
    assert max_fidelity(exact(2, 0.3, 0.0, 1.0)) == pytest.approx(0.25, abs=1e-12)
    assert max_fidelity(exact(2, 0.3, 0.0, 1.0), fit_theta=True) == pytest.approx(0.25, abs=1e-12)


def test_max_fidelity_matches_oracle_overlap():
    state = PreparedState.from_angles(3, 0.5, 1.2, 0.2)
    rho = oracle.prepared_density(state)
    target = oracle.density(oracle.psi_vector(3, 0.5, 1.2))
    assert max_fidelity(exact_expectations(state), fit_theta=True) == pytest.approx(
        oracle.trace_expectation(target, rho), abs=1e-12
    )


@pytest.mark.parametrize("family,n,theta,phi,expected", [
    (Family.FULL_PHI, 4, math.pi / 4, 0.0, -0.5),
    (Family.FULL_PHI, 4, math.pi / 4, math.pi, -0.5),
    (Family.BASELINE, 4, math.pi / 4, math.pi, 0.5),
    (Family.EFFICIENT_PHI, 3, math.pi / 4, 0.0, -0.25),
    (Family.EFFICIENT_PHI_THETA, 3, math.pi / 3, 2.0, 0.75 / 2 - 0.5),
])
def test_evaluate_examples(family, n, theta, phi, expected):
    report = evaluate(family, exact(n, theta, phi))
    assert report.witness_value == pytest.approx(expected, abs=1e-12)
    rho = oracle.prepared_density(PreparedState.from_angles(n, theta, phi))
    w = oracle.witness_matrix(family, theta, phi, n)
    assert oracle.trace_expectation(w, rho) == pytest.approx(expected, abs=1e-12)
    assert report.entangled == (expected < 0)


@pytest.mark.parametrize("n", range(2, 9))
def test_evaluate_matches_oracle_trace(n):
    rng = np.random.default_rng(n)
    for _ in range(6):
        state = PreparedState.from_angles(n, rng.uniform(0.05, 1.5), rng.uniform(-math.pi, math.pi), rng.uniform(0, 0.6))
        rho = oracle.prepared_density(state)
        es = exact_expectations(state)
        for family in FAMILIES:
            r = evaluate(family, es)
            phi = r.phi_opt if r.phi_opt is not None else 0.0
            theta = r.theta_opt if r.theta_opt is not None else math.pi / 4
            w = oracle.witness_matrix(family, theta, phi, n)
            assert r.witness_value == pytest.approx(oracle.trace_expectation(w, rho), abs=1e-10)


def test_report_fields():
    r = evaluate(Family.FULL_PHI, exact(4, 0.5, 0.2, 0.1))
    assert r.theta_opt is None and r.max_fidelity is not None
    assert r.tolerances["n"] == 4
    assert r.tolerances["asymptotic"] <= r.tolerances["finite_n"]
    r = evaluate(Family.EFFICIENT_PHI_THETA, exact(4, 0.5, 0.2, 0.1))
    assert r.max_fidelity is None and r.theta_opt == pytest.approx(0.5)
    d = r.to_dict()
    assert d["family"] == "efficient-phi-theta" and d["verdict"] in ("entangled", "inconclusive")


def test_evaluate_missing_setting():
    es = exact_expectations(PreparedState.from_angles(3), Protocol.EFFICIENT)
    with pytest.raises(IncompleteDataError):
        evaluate(Family.FULL_PHI, es)


@given(st.integers(2, 8), st.floats(0, math.pi / 2), st.floats(-math.pi, math.pi), st.floats(0, 1),
       st.sampled_from(FAMILIES))
def test_entangled_implies_negative(n, theta, phi, p, family):
    r = evaluate(family, exact(n, theta, phi, p))
    if r.entangled:
        assert r.witness_value < 0


def test_sampled_report_has_errors():
    state = PreparedState.from_angles(4, 0.6, 0.9, 0.1)
    es = estimate_expectations(sample_protocol(state, Protocol.FULL, 20_000, 1))
    r = evaluate(Family.FULL_PHI_THETA, es)
    assert r.witness_error > 0 and r.phi_error > 0 and r.theta_error > 0
    assert r.entangled


def test_significance_controls_verdict():
    state = PreparedState.from_angles(4, 0.6, 0.9, 0.5)
    es = estimate_expectations(sample_protocol(state, Protocol.FULL, 2_000, 1))
    lax = evaluate(Family.FULL_PHI, es, significance=0.0)
    strict = evaluate(Family.FULL_PHI, es, significance=1e6)
    assert lax.entangled == (lax.witness_value < 0)
    assert not strict.entangled


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [8, 20])
def test_threshold_crossing(family, n):
    for theta in np.linspace(0.1, math.pi / 2 - 0.1, 7):
        phi = 0.4 if family is Family.BASELINE else 0.0
        measured = threshold_by_bisection(family, n, theta, phi)
        tol = tolerance(family, theta, n, phi)
        assert measured == pytest.approx(tol.finite_n, abs=1e-9)
        assert abs(measured - tol.asymptotic) <= 2.0 ** (2 - n)


def test_tolerance_examples():
    assert white_noise_tolerance(3) == pytest.approx(4 / 7)
    assert tolerance(Family.FULL_PHI, math.pi / 4).asymptotic == pytest.approx(0.5)
    assert tolerance(Family.FULL_PHI_THETA, math.pi / 4).asymptotic == pytest.approx(0.5)
    assert tolerance(Family.EFFICIENT_PHI_THETA, math.pi / 4, 4).finite_n == pytest.approx(4 / 11)
    assert tolerance(Family.BASELINE, math.pi / 4, 3, 0.0).finite_n == pytest.approx(4 / 7)
    assert tolerance(Family.BASELINE, 0.5, 4, 2.5) == tolerance(Family.BASELINE, 0.5, 4, 2.5)
    assert tolerance(Family.BASELINE, 0.5, 4, 2.5).finite_n == 0.0


def test_finite_n_converges():
    for family in FAMILIES:
        tol = [tolerance(family, 0.5, n) for n in (4, 10, 30, 60)]
        gaps = [abs(t.finite_n - t.asymptotic) for t in tol]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 1e-15


def test_dominance():
    for theta in np.linspace(0, math.pi / 2, 500):
        assert tolerance(Family.FULL_PHI, theta).asymptotic >= tolerance(Family.FULL_PHI_THETA, theta).asymptotic - 1e-12
        assert (tolerance(Family.EFFICIENT_PHI, theta).asymptotic
                >= tolerance(Family.EFFICIENT_PHI_THETA, theta).asymptotic - 1e-12)


def test_baseline_reproduction_large_n():
    rng = np.random.default_rng(30)
    n = 30
    for _ in range(300):
        theta, phi, p = rng.uniform(0, math.pi / 2), rng.uniform(-math.pi, math.pi), rng.uniform(0, 0.6)
        margin = math.sin(2 * theta) * math.cos(phi) - p / (1 - p)
        if abs(margin) < 1e-6:
            continue
        value = evaluate(Family.BASELINE, exact(n, theta, phi, p)).witness_value
        assert (value < 0) == (margin > 0)


def test_phi_opt_invariant_under_shot_scaling():
    state = PreparedState.from_angles(4, 0.7, -2.1, 0.2)
    es = estimate_expectations(sample_protocol(state, Protocol.FULL, 5_000, 8))
    scaled = replace(
        es,
        values={k: Estimate(e.value, e.stderr / 10, e.shots * 100) for k, e in es.values.items()},
        diagonal_cov=es.diagonal_cov / 100,
    )
    for family in (Family.FULL_PHI, Family.FULL_PHI_THETA):
        a, b = evaluate(family, es), evaluate(family, scaled)
        assert a.phi_opt == b.phi_opt
        assert a.witness_value == b.witness_value
        assert b.witness_error == pytest.approx(a.witness_error / 10, rel=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sigma_y_position_irrelevant(n):
    for theta, phi in [(math.pi / 4, 0.8), (0.5, -2.0)]:
        rho = oracle.prepared_density(PreparedState.from_angles(n, theta, phi, 0.1))
        values = []
        for j in range(n):
            label = "".join("Y" if i == j else "X" for i in range(n))
            w = (0.5 * np.eye(2 ** n) - oracle.diagonal_projector(n)
                 - 0.25 * (math.cos(phi) * oracle.pauli_string("X" * n) + math.sin(phi) * oracle.pauli_string(label)))
            values.append(oracle.trace_expectation(w, rho))
        assert np.ptp(values) < 1e-12
        r = evaluate(Family.EFFICIENT_PHI, exact(n, theta, phi, 0.1))
        assert r.witness_value <= values[0] + 1e-12


@pytest.mark.parametrize("theta", [0.0, math.pi / 4, math.pi / 2])
def test_gap_zeros(theta):
    g, l = gap_functions(theta)
    assert abs(g) < 1e-12 and abs(l) < 1e-12


def test_gap_value():
    g, _ = gap_functions(math.pi / 8)
    assert g == pytest.approx(0.2678, abs=1e-4)
    eq33 = tolerance(Family.FULL_PHI, math.pi / 8).asymptotic
    eq31 = tolerance(Family.FULL_PHI_THETA, math.pi / 8).asymptotic
    assert g == pytest.approx(eq33 - eq31, abs=1e-15)


@given(st.floats(0, math.pi / 2))
def test_gap_symmetric_and_non_negative(theta):
    g, l = gap_functions(theta)
    g2, l2 = gap_functions(math.pi / 2 - theta)
    assert g >= -1e-12 and l >= -1e-12
    assert g == pytest.approx(g2, abs=1e-12)
    assert l == pytest.approx(l2, abs=1e-12)
