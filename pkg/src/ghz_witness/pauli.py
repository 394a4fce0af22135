"""Symbolic tensor-product observables.

Products of single-qubit observables from {I, X, Y, Z, cos(a)X + sin(a)Y}
and real linear combinations of them.  Qubit 1 is the leftmost tensor factor
and the most significant bit of a computational-basis index.

Conjugation by CNOT gates is done symbolically through the Clifford action on
Pauli factors; the results are checked against dense matrices in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

import numpy as np

COEFF_ATOL = 1e-14
MAX_DENSE_QUBITS = 10

_PAULI_KINDS = ("I", "X", "Y", "Z")


class SizeLimitError(ValueError):
    """Raised when a dense representation would exceed the qubit cap."""


class UnsupportedFactorError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Single:
    """One single-qubit observable.

    ``kind`` is one of ``"I", "X", "Y", "Z"`` or ``"A"``; the last one stands
    for ``cos(angle) X + sin(angle) Y`` and is the only kind that uses
    ``angle``.
    """

    kind: str
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in _PAULI_KINDS and self.kind != "A":
            raise ValueError(f"unknown single-qubit kind {self.kind!r}")
        if self.kind != "A" and self.angle != 0.0:
            raise ValueError(f"kind {self.kind} takes no angle")

    @property
    def is_pauli(self) -> bool:
        return self.kind in _PAULI_KINDS

    def matrix(self) -> np.ndarray:
        if self.kind == "A":
            a = self.angle
            return np.array([[0, np.exp(-1j * a)], [np.exp(1j * a), 0]], dtype=complex)
        return _PAULI_MATRICES[self.kind].copy()

    def __str__(self):
        return f"A({self.angle:.6g})" if self.kind == "A" else self.kind


I = Single("I")
X = Single("X")
Y = Single("Y")
Z = Single("Z")


def xy(angle: float) -> Single:
    """Single-qubit ``cos(angle) X + sin(angle) Y``."""
    return Single("A", float(angle))


_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# a * b = phase * c for single-qubit Paulis
_PAULI_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in _PAULI_KINDS:
    _PAULI_PRODUCT[("I", _a)] = (1, _a)
    _PAULI_PRODUCT[(_a, "I")] = (1, _a)
    _PAULI_PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PAULI_PRODUCT[(_a, _b)] = (1j, _c)
    _PAULI_PRODUCT[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True, order=True)
class ProductObservable:
    """Tensor product of single-qubit observables, qubit 1 first."""

    factors: tuple[Single, ...]

    @classmethod
    def from_label(cls, label: str) -> "ProductObservable":
        """Build from a Pauli label such as ``"XZI"``."""
        return cls(tuple(Single(ch) for ch in label.upper()))

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def label(self) -> str:
        return "".join(str(f) for f in self.factors)

    def matrix(self) -> np.ndarray:
        _check_dense_size(self.n)
        return reduce(np.kron, (f.matrix() for f in self.factors), np.ones((1, 1), dtype=complex))

    def __str__(self):
        return self.label


Term = tuple[float, ProductObservable]


def _pauli_multiply(a: ProductObservable, b: ProductObservable) -> tuple[complex, ProductObservable]:
    phase: complex = 1
    out = []
    for fa, fb in zip(a.factors, b.factors):
        if not (fa.is_pauli and fb.is_pauli):
            raise UnsupportedFactorError("operator products need Pauli factors; call expand_xy() first")
        ph, kind = _PAULI_PRODUCT[(fa.kind, fb.kind)]
        phase *= ph
        out.append(Single(kind))
    return phase, ProductObservable(tuple(out))


@dataclass(frozen=True)
class ObservableSum:
    """Real linear combination of product observables on ``n`` qubits.

    Terms are kept merged and sorted by product, and coefficients smaller than
    ``COEFF_ATOL`` are dropped, so two sums built from the same operator
    compare equal with ``==`` (exact) or :meth:`isclose` (tolerant).
    """

    n: int
    terms: tuple[Term, ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, ProductObservable]], n: int | None = None) -> "ObservableSum":
        merged: dict[ProductObservable, complex] = {}
        for coef, prod in terms:
            if n is None:
                n = prod.n
            if prod.n != n:
                raise ValueError(f"term {prod} has {prod.n} factors, expected {n}")
            merged[prod] = merged.get(prod, 0.0) + coef
        if n is None:
            raise ValueError("cannot infer qubit count of an empty sum")
        out = []
        for prod in sorted(merged):
            c = merged[prod]
            if abs(complex(c).imag) > 1e-12:
                raise ValueError(f"non-real coefficient {c} for {prod}; result is not Hermitian")
            c = float(complex(c).real)
            if abs(c) >= COEFF_ATOL:
                out.append((c, prod))
        return cls(n, tuple(out))

    @classmethod
    def single(cls, prod: ProductObservable | str, coef: float = 1.0) -> "ObservableSum":
        if isinstance(prod, str):
            prod = ProductObservable.from_label(prod)
        return cls.from_terms([(coef, prod)])

    @classmethod
    def identity(cls, n: int, coef: float = 1.0) -> "ObservableSum":
        return cls.single("I" * n, coef)

    @classmethod
    def zero(cls, n: int) -> "ObservableSum":
        return cls(n, ())

    def __add__(self, other: "ObservableSum") -> "ObservableSum":
        if not isinstance(other, ObservableSum):
            return NotImplemented
        self._check_same_n(other)
        return ObservableSum.from_terms(self.terms + other.terms, self.n)

    def __neg__(self) -> "ObservableSum":
        return self * -1.0

    def __sub__(self, other: "ObservableSum") -> "ObservableSum":
        return self + (-other)

    def __mul__(self, scalar: float) -> "ObservableSum":
        if not isinstance(scalar, (int, float, np.floating, np.integer)):
            return NotImplemented
        return ObservableSum.from_terms(((scalar * c, p) for c, p in self.terms), self.n)

    __rmul__ = __mul__

    def __matmul__(self, other: "ObservableSum") -> "ObservableSum":
        """Operator product; the result must be Hermitian."""
        if not isinstance(other, ObservableSum):
            return NotImplemented
        self._check_same_n(other)
        terms = []
        for ca, pa in self.terms:
            for cb, pb in other.terms:
                phase, prod = _pauli_multiply(pa, pb)
                terms.append((ca * cb * phase, prod))
        return ObservableSum.from_terms(terms, self.n)

    def _check_same_n(self, other: "ObservableSum"):
        if other.n != self.n:
            raise ValueError(f"qubit counts differ: {self.n} vs {other.n}")

    def isclose(self, other: "ObservableSum", atol: float = 1e-12) -> bool:
        if other.n != self.n:
            return False
        diff = self - other
        return all(abs(c) <= atol for c, _ in diff.terms)

    def coefficient(self, prod: ProductObservable | str) -> float:
        if isinstance(prod, str):
            prod = ProductObservable.from_label(prod)
        for c, p in self.terms:
            if p == prod:
                return c
        return 0.0

    def expand_xy(self) -> "ObservableSum":
        """Rewrite every ``A(a)`` factor as ``cos(a) X + sin(a) Y``."""
        terms: list[Term] = []
        for coef, prod in self.terms:
            partial = [(coef, ())]
            for f in prod.factors:
                if f.kind == "A":
                    opts = ((math.cos(f.angle), X), (math.sin(f.angle), Y))
                else:
                    opts = ((1.0, f),)
                partial = [(c * w, fs + (g,)) for c, fs in partial for w, g in opts]
            terms.extend((c, ProductObservable(fs)) for c, fs in partial)
        return ObservableSum.from_terms(terms, self.n)

    def embed(self, n: int) -> "ObservableSum":
        """Pad every term with identities on qubits ``self.n + 1 .. n``."""
        pad = (I,) * (n - self.n)
        return ObservableSum.from_terms(((c, ProductObservable(p.factors + pad)) for c, p in self.terms), n)

    def matrix(self) -> np.ndarray:
        return dense_matrix(self)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c:.6g}*{p}" for c, p in self.terms)


def _check_dense_size(n: int):
    if n > MAX_DENSE_QUBITS:
        raise SizeLimitError(f"dense matrices are capped at {MAX_DENSE_QUBITS} qubits, got {n}")


def dense_matrix(obs: Union[ObservableSum, ProductObservable]) -> np.ndarray:
    """``2**n x 2**n`` complex matrix of ``obs`` (sigma_y = [[0, -i], [i, 0]])."""
    if isinstance(obs, ProductObservable):
        return obs.matrix()
    _check_dense_size(obs.n)
    dim = 2 ** obs.n
    out = np.zeros((dim, dim), dtype=complex)
    for coef, prod in obs.terms:
        out += coef * prod.matrix()
    return out


def ghz_stabilizer_generators(n: int) -> list[ObservableSum]:
    """``[X...X, Z1 Z2, Z2 Z3, ..., Z(n-1) Zn]``."""
    if n < 2:
        raise ValueError(f"GHZ stabilizers need n >= 2, got {n}")
    gens = [ObservableSum.single("X" * n)]
    for i in range(n - 1):
        label = ["I"] * n
        label[i] = label[i + 1] = "Z"
        gens.append(ObservableSum.single("".join(label)))
    return gens


def ghz_projectors(n: int) -> tuple[ObservableSum, ObservableSum]:
    """Projectors ``(I + S_1)/2`` and ``prod_{i>=2} (I + S_i)/2``."""
    gens = ghz_stabilizer_generators(n)
    half_id = ObservableSum.identity(n, 0.5)
    p1 = half_id + 0.5 * gens[0]
    p2 = ObservableSum.identity(n)
    for s in gens[1:]:
        p2 = p2 @ (half_id + 0.5 * s)
    return p1, p2


# CNOT images of single-qubit Paulis, as (control factor, target factor)
_CONTROL_IMAGE = {"I": ("I", "I"), "X": ("X", "X"), "Y": ("Y", "X"), "Z": ("Z", "I")}
_TARGET_IMAGE = {"I": ("I", "I"), "X": ("I", "X"), "Y": ("Z", "Y"), "Z": ("Z", "Z")}


def _cnot_pair_table() -> dict[tuple[str, str], tuple[int, str, str]]:
    table = {}
    for pc in _PAULI_KINDS:
        for pt in _PAULI_KINDS:
            (c1, t1), (c2, t2) = _CONTROL_IMAGE[pc], _TARGET_IMAGE[pt]
            ph_c, c = _PAULI_PRODUCT[(c1, c2)]
            ph_t, t = _PAULI_PRODUCT[(t1, t2)]
            phase = ph_c * ph_t
            assert phase.imag == 0
            table[(pc, pt)] = (int(phase.real), c, t)
    return table


_CNOT_TABLE = _cnot_pair_table()


def cnot_conjugate(obs: ObservableSum, control: int, target: int) -> ObservableSum:
    """``CNOT . obs . CNOT`` for a CNOT on 1-based qubits ``control -> target``."""
    n = obs.n
    if control == target or not (1 <= control <= n and 1 <= target <= n):
        raise ValueError(f"invalid CNOT pair ({control}, {target}) on {n} qubits")
    ci, ti = control - 1, target - 1
    terms = []
    for coef, prod in obs.terms:
        fc, ft = prod.factors[ci], prod.factors[ti]
        if not (fc.is_pauli and ft.is_pauli):
            raise UnsupportedFactorError(
                f"factor {fc if not fc.is_pauli else ft} on a CNOT qubit; call expand_xy() first"
            )
        sign, c, t = _CNOT_TABLE[(fc.kind, ft.kind)]
        factors = list(prod.factors)
        factors[ci], factors[ti] = Single(c), Single(t)
        terms.append((sign * coef, ProductObservable(tuple(factors))))
    return ObservableSum.from_terms(terms, n)


def wrap_angle(phi: float) -> float:
    """Map an angle into ``[-pi, pi)``."""
    return (phi + math.pi) % (2 * math.pi) - math.pi


def noisy_hadamard_conjugate_z(theta: float, phi: float) -> ObservableSum:
    """Image of sigma_z under the first-qubit unitary ``|0> -> cos t|0> + e^{i phi} sin t|1>``."""
    phi = wrap_angle(phi)
    s2 = math.sin(2 * theta)
    return ObservableSum.from_terms(
        [
            (math.cos(2 * theta), ProductObservable((Z,))),
            (s2 * math.cos(phi), ProductObservable((X,))),
            (s2 * math.sin(phi), ProductObservable((Y,))),
        ],
        1,
    )


def s1_prime(n: int, theta: float, phi: float) -> ObservableSum:
    """First generalized stabilizer of ``cos t|0..0> + e^{i phi} sin t|1..1>``.

    Obtained by pushing the rotated sigma_z of qubit 1 through the CNOT ladder
    (1,2), (2,3), ..., (n-1,n).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    obs = noisy_hadamard_conjugate_z(theta, phi).embed(n)
    for q in range(1, n):
        obs = cnot_conjugate(obs, q, q + 1)
    return obs
