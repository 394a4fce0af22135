"""Witness families, optimal-parameter estimation and noise tolerances.

Each family is a set of witnesses indexed by the coherent-noise angles; the
estimators below pick the member that best matches the measured data, and
:func:`evaluate` reports its value together with a delta-method error.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .pauli import wrap_angle
from .protocol import ExpectationSet, Protocol, dft_coefficients, exact_expectations
from .states import PreparedState

DEGENERACY_ATOL = 1e-9
DEFAULT_SIGNIFICANCE = 3.0


class Family(enum.Enum):
    FULL_PHI = "full-phi"
    FULL_PHI_THETA = "full-phi-theta"
    EFFICIENT_PHI = "efficient-phi"
    EFFICIENT_PHI_THETA = "efficient-phi-theta"
    BASELINE = "baseline"

    @property
    def protocol(self) -> Protocol:
        if self in (Family.EFFICIENT_PHI, Family.EFFICIENT_PHI_THETA):
            return Protocol.EFFICIENT
        return Protocol.FULL

    @property
    def fits_phi(self) -> bool:
        return self is not Family.BASELINE

    @property
    def fits_theta(self) -> bool:
        return self in (Family.FULL_PHI_THETA, Family.EFFICIENT_PHI_THETA)

    def separable_bound(self, theta: float = math.pi / 4) -> float:
        """Coefficient of the identity in the family member at ``theta``."""
        if self is Family.FULL_PHI_THETA:
            return schmidt_bound(theta)
        if self is Family.EFFICIENT_PHI_THETA:
            return (2 * schmidt_bound(theta) + 1) / 4
        return 0.5


def schmidt_bound(theta: float) -> float:
    """Largest Schmidt coefficient ``max(cos^2, sin^2)`` of the GHZ-like state."""
    return max(math.cos(theta) ** 2, math.sin(theta) ** 2)


# -- kernels on the flat vector [z0, z1, mz, <M_1>, ...] from ExpectationSet.vector

def _x_pm(x: np.ndarray, coeffs) -> tuple[float, float]:
    m = x[3:]
    return float(coeffs.c_plus @ m), float(coeffs.c_minus @ m)


def _in_plane(x: np.ndarray, protocol: Protocol, coeffs) -> tuple[float, float]:
    """The two quadratures whose angle is phi: ``(X_+, X_-)`` or ``(<M_x>, <M_x'>)``."""
    if protocol is Protocol.FULL:
        return _x_pm(x, coeffs)
    return float(x[3]), float(x[4])


def _theta_pair(x: np.ndarray, protocol: Protocol, coeffs) -> tuple[float, float]:
    """``(cos-part, sin-part)`` of ``2 theta``."""
    a, b = _in_plane(x, protocol, coeffs)
    if protocol is Protocol.FULL:
        return float(x[0] - x[1]), 2 * math.hypot(a, b)
    return float(x[2]), math.hypot(a, b)


def _phi_kernel(x, protocol, coeffs) -> float:
    a, b = _in_plane(x, protocol, coeffs)
    return wrap_angle(math.atan2(b, a))


def _theta_kernel(x, protocol, coeffs) -> float:
    c, s = _theta_pair(x, protocol, coeffs)
    return 0.5 * math.atan2(s, c)


def _gradient(fn: Callable[[np.ndarray], float], x: np.ndarray, periodic: bool, h: float = 1e-6) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(x.size):
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        d = fn(up) - fn(down)
        if periodic:
            d = wrap_angle(d)
        g[i] = d / (2 * h)
    return g


def _propagate(fn, x: np.ndarray, cov: np.ndarray, periodic: bool = False) -> float:
    """Delta-method standard error of ``fn(x)`` for estimates with covariance ``cov``."""
    if not np.any(cov):
        return 0.0
    g = _gradient(fn, x, periodic)
    return float(math.sqrt(max(g @ cov @ g, 0.0)))


def _combined_se(fn_pair, x, cov) -> float:
    se = [_propagate(lambda v, i=i: fn_pair(v)[i], x, cov) for i in range(2)]
    return math.hypot(*se)


def _is_degenerate(pair_fn, x, cov) -> bool:
    a, b = pair_fn(x)
    threshold = max(DEGENERACY_ATOL, 2 * _combined_se(pair_fn, x, cov))
    return bool(math.hypot(a, b) < threshold)


@dataclass(frozen=True)
class AngleEstimate:
    value: float
    stderr: float
    degenerate: bool = False


def _estimate_phi(es: ExpectationSet, protocol: Protocol) -> AngleEstimate:
    x, cov = es.vector(protocol)
    coeffs = dft_coefficients(es.n)
    pair = lambda v: _in_plane(v, protocol, coeffs)  # noqa: E731
    if _is_degenerate(pair, x, cov):
        return AngleEstimate(0.0, 0.0, True)
    fn = lambda v: _phi_kernel(v, protocol, coeffs)  # noqa: E731
    return AngleEstimate(fn(x), _propagate(fn, x, cov, periodic=True))


def _estimate_theta(es: ExpectationSet, protocol: Protocol) -> AngleEstimate:
    x, cov = es.vector(protocol)
    coeffs = dft_coefficients(es.n)
    pair = lambda v: _theta_pair(v, protocol, coeffs)  # noqa: E731
    if _is_degenerate(pair, x, cov):
        return AngleEstimate(math.pi / 4, 0.0, True)
    fn = lambda v: _theta_kernel(v, protocol, coeffs)  # noqa: E731
    return AngleEstimate(fn(x), _propagate(fn, x, cov))


def phi_opt_full(es: ExpectationSet) -> AngleEstimate:
    """Phase of ``(<X_+>, <X_->)``, in ``[-pi, pi)``; falls back to 0 when both vanish."""
    return _estimate_phi(es, Protocol.FULL)


def theta_opt_full(es: ExpectationSet) -> AngleEstimate:
    """Half the angle of ``(z0 - z1, 2 sqrt(<X_+>^2 + <X_->^2))``; falls back to pi/4."""
    return _estimate_theta(es, Protocol.FULL)


def phi_opt_efficient(es: ExpectationSet) -> AngleEstimate:
    return _estimate_phi(es, Protocol.EFFICIENT)


def theta_opt_efficient(es: ExpectationSet) -> AngleEstimate:
    return _estimate_theta(es, Protocol.EFFICIENT)


def _max_fidelity_kernel(x, coeffs, fit_theta: bool) -> float:
    xp, xm = _x_pm(x, coeffs)
    r2 = xp * xp + xm * xm
    mean = 0.5 * (x[0] + x[1])
    if fit_theta:
        return float(mean + math.sqrt(0.25 * (x[0] - x[1]) ** 2 + r2))
    return float(mean + math.sqrt(r2))


def max_fidelity(es: ExpectationSet, fit_theta: bool = False) -> float:
    """Largest fidelity with the GHZ-like family, over phi only or over (phi, theta)."""
    x, _ = es.vector(Protocol.FULL)
    return _max_fidelity_kernel(x, dft_coefficients(es.n), fit_theta)


def _witness_kernel(family: Family, x: np.ndarray, coeffs, phi: float, theta: float) -> float:
    z0, z1, mz = x[0], x[1], x[2]
    zbar = 0.5 * (z0 + z1)
    cp, sp = math.cos(phi), math.sin(phi)
    if family is Family.BASELINE:
        xp, _ = _x_pm(x, coeffs)
        return 0.5 - zbar - xp
    if family is Family.FULL_PHI:
        xp, xm = _x_pm(x, coeffs)
        return 0.5 - zbar - (cp * xp + sp * xm)
    if family is Family.FULL_PHI_THETA:
        xp, xm = _x_pm(x, coeffs)
        fid = math.cos(theta) ** 2 * z0 + math.sin(theta) ** 2 * z1 + math.sin(2 * theta) * (cp * xp + sp * xm)
        return schmidt_bound(theta) - fid
    mx, my = x[3], x[4]
    if family is Family.EFFICIENT_PHI:
        return 0.5 - zbar - 0.25 * (cp * mx + sp * my)
    s1 = math.cos(2 * theta) * mz + math.sin(2 * theta) * (cp * mx + sp * my)
    return (2 * schmidt_bound(theta) + 1) / 4 - zbar - 0.25 * s1


def witness_value(family: Family, es: ExpectationSet, phi: float = 0.0, theta: float = math.pi / 4) -> float:
    """Estimated expectation of the family member at fixed ``(phi, theta)``."""
    x, _ = es.vector(family.protocol)
    return _witness_kernel(family, x, dft_coefficients(es.n), phi, theta)


@dataclass(frozen=True)
class Tolerance:
    """White-noise thresholds: ``asymptotic`` (large n) and ``finite_n`` (None without n)."""

    asymptotic: float
    finite_n: float | None = None
    n: int | None = None


def tolerance(family: Family, theta: float, n: int | None = None, phi: float = 0.0) -> Tolerance:
    """Largest white-noise weight ``p`` still detected by the optimal family member.

    The state is the GHZ-like state with parameters ``(theta, phi)``; only the
    baseline GHZ witness depends on ``phi``.  Thresholds that would be
    negative (no detection even at ``p = 0``) are reported as 0.
    """
    s = math.sin(2 * theta)
    f = schmidt_bound(theta)
    eps = None if n is None else 2.0 ** (1 - n)

    if family in (Family.BASELINE, Family.FULL_PHI):
        a = s * math.cos(phi) if family is Family.BASELINE else s
        if a <= 0:
            return Tolerance(0.0, None if n is None else 0.0, n)
        finite = None if n is None else a / (1 + a - eps)
        return Tolerance(a / (1 + a), finite, n)
    if family is Family.FULL_PHI_THETA:
        finite = None if n is None else (1 - f) / (1 - 2.0 ** -n)
        return Tolerance(1 - f, finite, n)
    if family is Family.EFFICIENT_PHI:
        finite = None if n is None else s / (s + 2 - 2 * eps)
        return Tolerance(s / (s + 2), finite, n)
    finite = None if n is None else 2.0 ** (n - 1) / (3 * 2.0 ** (n - 2) - 1) * (1 - f)
    return Tolerance(2 / 3 * (1 - f), finite, n)


def white_noise_tolerance(n: int) -> float:
    """Threshold of the GHZ fidelity witness on the GHZ state, ``2^(n-1)/(2^n - 1)``."""
    return 2.0 ** (n - 1) / (2.0 ** n - 1)


def gap_functions(theta: float) -> tuple[float, float]:
    """Advantage of the phi-only families over the (phi, theta) families.

    ``g`` compares the two fidelity families, ``l`` the two efficient ones;
    both are non-negative on ``[0, pi/2]``.
    """
    s = math.sin(2 * theta)
    m = min(math.cos(theta) ** 2, math.sin(theta) ** 2)
    g = (1 - 1 / (s + 1)) - m
    l = (1 - 2 / (s + 2)) - 2 / 3 * m
    return g, l


@dataclass
class DetectionReport:
    family: Family
    n: int
    phi_opt: float | None
    phi_error: float | None
    theta_opt: float | None
    theta_error: float | None
    max_fidelity: float | None
    witness_value: float
    witness_error: float
    significance: float
    tolerances: dict
    degenerate: list[str] = field(default_factory=list)

    @property
    def entangled(self) -> bool:
        return bool(self.witness_value + self.significance * self.witness_error < 0)

    @property
    def verdict(self) -> str:
        return "entangled" if self.entangled else "inconclusive"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        d["entangled"] = self.entangled
        d["verdict"] = self.verdict
        return d


def evaluate(family: Family, es: ExpectationSet, significance: float = DEFAULT_SIGNIFICANCE) -> DetectionReport:
    """Optimal family member for the data ``es``, its value and error."""
    protocol = family.protocol
    x, cov = es.vector(protocol)
    coeffs = dft_coefficients(es.n)
    degenerate = []

    phi_est = _estimate_phi(es, protocol)
    theta_est = _estimate_theta(es, protocol)
    if family.fits_phi and phi_est.degenerate:
        degenerate.append("phi")
    if family.fits_theta and theta_est.degenerate:
        degenerate.append("theta")

    def params(v):
        phi = 0.0 if phi_est.degenerate else _phi_kernel(v, protocol, coeffs)
        theta = math.pi / 4 if theta_est.degenerate else _theta_kernel(v, protocol, coeffs)
        return phi, theta

    def value(v):
        phi, theta = params(v)
        return _witness_kernel(family, v, coeffs, phi, theta)

    w = value(x)
    w_err = _propagate(value, x, cov)

    fid = None
    if protocol is Protocol.FULL and family is not Family.BASELINE:
        fid = _max_fidelity_kernel(x, coeffs, family.fits_theta)

    tol_phi = phi_est.value if family is Family.BASELINE else 0.0
    tol = tolerance(family, theta_est.value, es.n, tol_phi)
    tolerances = {
        "theta": theta_est.value,
        "asymptotic": tol.asymptotic,
        "finite_n": tol.finite_n,
        "n": es.n,
    }
    if family is Family.BASELINE:
        tolerances["phi"] = phi_est.value

    return DetectionReport(
        family=family,
        n=es.n,
        phi_opt=phi_est.value if family.fits_phi else None,
        phi_error=phi_est.stderr if family.fits_phi else None,
        theta_opt=theta_est.value if family.fits_theta else None,
        theta_error=theta_est.stderr if family.fits_theta else None,
        max_fidelity=fid,
        witness_value=w,
        witness_error=w_err,
        significance=significance,
        tolerances=tolerances,
        degenerate=degenerate,
    )


def exact_witness_value(family: Family, state: PreparedState) -> float:
    """Optimal witness value computed from exact expectations of ``state``."""
    return evaluate(family, exact_expectations(state, family.protocol)).witness_value


def threshold_by_bisection(
    family: Family, n: int, theta: float, phi: float = 0.0, xtol: float = 1e-14
) -> float:
    """White-noise weight where the optimal witness value on exact data crosses zero."""

    def value(p):
        return exact_witness_value(family, PreparedState.from_angles(n, theta, phi, p))

    if value(0.0) >= 0:
        return 0.0
    return float(bisect(value, 0.0, 1.0, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200))
