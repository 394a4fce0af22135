"""Closed-form model of noisy GHZ-like states.

The prepared state is

    rho = (1 - p) |Psi><Psi| + p I / 2**n,
    |Psi> = cos(theta) |0...0> + exp(i phi) sin(theta) |1...1>,

and every measurement setting used here is either the computational basis or
a product of ``cos(a_j) X + sin(a_j) Y`` factors.  For those settings all
expectations and outcome probabilities have closed forms, so nothing in this
module needs ``2**n`` memory.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .pauli import ProductObservable, Single, X, Y, Z, wrap_angle, xy

_ANGLE_SLACK = 1e-12


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class CoherentParams:
    """Coherent-noise parameters; ``phi`` is normalized into ``[-pi, pi)``."""

    theta: float = math.pi / 4
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not (-_ANGLE_SLACK <= theta <= math.pi / 2 + _ANGLE_SLACK):
            raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi / 2))
        object.__setattr__(self, "phi", wrap_angle(float(self.phi)))


@dataclass(frozen=True)
class PreparedState:
    n: int
    coherent: CoherentParams = CoherentParams()
    p: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @classmethod
    def from_angles(cls, n: int, theta: float = math.pi / 4, phi: float = 0.0, p: float = 0.0) -> "PreparedState":
        return cls(n, CoherentParams(theta, phi), p)

    @property
    def theta(self) -> float:
        return self.coherent.theta

    @property
    def phi(self) -> float:
        return self.coherent.phi

    @property
    def coherence(self) -> float:
        """``(1 - p) sin(2 theta)``, twice the modulus of the |0..0><1..1| element."""
        return (1 - self.p) * math.sin(2 * self.theta)


class SettingKind(enum.Enum):
    Z = "Z"
    XY = "XY"
    XALL = "XALL"
    YX = "YX"


@dataclass(frozen=True)
class MeasurementSetting:
    """One local measurement setting on ``n`` qubits.

    ``XY`` settings carry the index ``k`` of the angle ``k pi / (n + 1)``
    applied on every qubit; ``XALL`` is sigma_x on every qubit and ``YX`` is
    sigma_y on qubit 1 followed by sigma_x on the rest.
    """

    kind: SettingKind
    n: int
    k: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kind is SettingKind.XY:
            if self.k is None or not 0 <= self.k <= self.n:
                raise ValueError(f"XY setting index must lie in 0..{self.n}, got {self.k}")
        elif self.k is not None:
            raise ValueError(f"{self.kind.value} setting takes no index")

    @classmethod
    def z(cls, n: int) -> "MeasurementSetting":
        return cls(SettingKind.Z, n)

    @classmethod
    def xy(cls, n: int, k: int) -> "MeasurementSetting":
        return cls(SettingKind.XY, n, k)

    @classmethod
    def x_all(cls, n: int) -> "MeasurementSetting":
        return cls(SettingKind.XALL, n)

    @classmethod
    def y_x_rest(cls, n: int) -> "MeasurementSetting":
        return cls(SettingKind.YX, n)

    @property
    def name(self) -> str:
        """Canonical name used in shot files: ``Z``, ``XY:k``, ``XALL`` or ``YX``."""
        if self.kind is SettingKind.XY:
            return f"XY:{self.k}"
        return self.kind.value

    @classmethod
    def from_name(cls, name: str, n: int) -> "MeasurementSetting":
        if name.startswith("XY:"):
            try:
                k = int(name[3:])
            except ValueError:
                raise ValueError(f"unknown setting name {name!r}") from None
            return cls.xy(n, k)
        try:
            kind = SettingKind(name)
        except ValueError:
            raise ValueError(f"unknown setting name {name!r}") from None
        if kind is SettingKind.XY:
            raise ValueError(f"unknown setting name {name!r}")
        return cls(kind, n)

    @property
    def angle(self) -> float | None:
        """Common XY angle ``k pi / (n + 1)`` of an ``XY`` setting."""
        if self.kind is SettingKind.XY:
            return self.k * math.pi / (self.n + 1)
        return None

    def qubit_angles(self) -> np.ndarray | None:
        """Per-qubit angles ``a_j`` of ``cos(a_j) X + sin(a_j) Y``; None for ``Z``."""
        if self.kind is SettingKind.Z:
            return None
        if self.kind is SettingKind.XY:
            return np.full(self.n, self.angle)
        angles = np.zeros(self.n)
        if self.kind is SettingKind.YX:
            angles[0] = math.pi / 2
        return angles

    def total_angle(self) -> float:
        a = self.qubit_angles()
        if a is None:
            raise ValueError("Z setting has no XY angle")
        if self.kind is SettingKind.XY:
            return self.n * self.angle
        return float(a.sum())

    def observable(self) -> ProductObservable:
        """Parity observable: product of the per-qubit measured observables."""
        if self.kind is SettingKind.Z:
            return ProductObservable((Z,) * self.n)
        if self.kind is SettingKind.XALL:
            return ProductObservable((X,) * self.n)
        if self.kind is SettingKind.YX:
            return ProductObservable((Y,) + (X,) * (self.n - 1))
        return ProductObservable((xy(self.angle),) * self.n)

    def qubit_observables(self) -> tuple[Single, ...]:
        return self.observable().factors

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class DiagonalStats:
    """Computational-basis statistics: P(0..0), P(1..1) and <sigma_z> on qubit 1."""

    z0: float
    z1: float
    mz: float

    @property
    def z(self) -> float:
        """Expectation of ``(|0..0><0..0| + |1..1><1..1|) / 2``."""
        return 0.5 * (self.z0 + self.z1)


def _check_n(state: PreparedState, setting: MeasurementSetting):
    if state.n != setting.n:
        raise DimensionError(f"state has {state.n} qubits, setting {setting.name} has {setting.n}")


def diagonal_stats(state: PreparedState) -> DiagonalStats:
    c2 = math.cos(state.theta) ** 2
    s2 = math.sin(state.theta) ** 2
    white = state.p / 2 ** state.n
    return DiagonalStats(
        z0=(1 - state.p) * c2 + white,
        z1=(1 - state.p) * s2 + white,
        mz=(1 - state.p) * math.cos(2 * state.theta),
    )


def expectation_exact(state: PreparedState, setting: MeasurementSetting) -> float:
    """Exact expectation of the setting's parity observable."""
    _check_n(state, setting)
    if setting.kind is SettingKind.Z:
        c2 = math.cos(state.theta) ** 2
        s2 = math.sin(state.theta) ** 2
        sign = 1 if state.n % 2 == 0 else -1
        return (1 - state.p) * (c2 + sign * s2)
    if setting.kind is SettingKind.XALL:
        return state.coherence * math.cos(state.phi)
    if setting.kind is SettingKind.YX:
        return state.coherence * math.sin(state.phi)
    return state.coherence * math.cos(state.phi - setting.total_angle())


def signs_to_string(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


def string_to_signs(outcome: str) -> np.ndarray:
    if any(ch not in "+-" for ch in outcome):
        raise ValueError(f"outcome {outcome!r} must use only '+' and '-'")
    return np.array([1 if ch == "+" else -1 for ch in outcome], dtype=np.int8)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Distribution of sign strings for one setting.

    For ``Z`` the all-``+`` string (all zeros) has mass ``z0``, the all-``-``
    string has ``z1`` and every other string ``p / 2**n``.  For the XY-type
    settings the probability depends only on the parity of the string:
    ``P(s) = 2**-n (1 + prod(s) * parity_mean)``.
    """

    n: int
    diagonal: bool
    parity_mean: float = 0.0
    z0: float = 0.0
    z1: float = 0.0
    white: float = 0.0

    def probability(self, outcome) -> float:
        signs = string_to_signs(outcome) if isinstance(outcome, str) else np.asarray(outcome)
        if len(signs) != self.n:
            raise DimensionError(f"outcome has {len(signs)} signs, expected {self.n}")
        if self.diagonal:
            if np.all(signs > 0):
                return self.z0
            if np.all(signs < 0):
                return self.z1
            return self.white / 2 ** self.n
        return (1 + int(np.prod(signs)) * self.parity_mean) / 2 ** self.n

    def as_dict(self, max_n: int = 16) -> dict[str, float]:
        if self.n > max_n:
            raise DimensionError(f"refusing to enumerate 2**{self.n} outcomes")
        return {
            "".join(s): self.probability("".join(s))
            for s in iproduct("+-", repeat=self.n)
        }

    def expectation(self) -> float:
        """Mean of the product of signs."""
        if self.diagonal:
            sign = 1 if self.n % 2 == 0 else -1
            return self.z0 + sign * self.z1 - (1 + sign) * self.white / 2 ** self.n
        return self.parity_mean

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``shots`` outcomes as a ``(shots, n)`` int8 array of +-1."""
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        n = self.n
        out = np.where(rng.random((shots, n)) < 0.5, 1, -1).astype(np.int8)
        if self.diagonal:
            u = rng.random(shots)
            coherent = 1.0 - self.white
            # the white component is the uniform draw already in ``out``
            out[u < self.z0 - self.white / 2 ** n] = 1
            out[(u >= self.z0 - self.white / 2 ** n) & (u < coherent)] = -1
            return out
        parity = np.where(rng.random(shots) < 0.5 * (1 + self.parity_mean), 1, -1)
        rest = np.prod(out[:, 1:], axis=1, dtype=np.int64) if n > 1 else np.ones(shots, dtype=np.int64)
        out[:, 0] = (parity * rest).astype(np.int8)
        return out


def outcome_distribution(state: PreparedState, setting: MeasurementSetting) -> OutcomeDistribution:
    _check_n(state, setting)
    if setting.kind is SettingKind.Z:
        d = diagonal_stats(state)
        return OutcomeDistribution(state.n, True, z0=d.z0, z1=d.z1, white=state.p)
    return OutcomeDistribution(state.n, False, parity_mean=expectation_exact(state, setting))
