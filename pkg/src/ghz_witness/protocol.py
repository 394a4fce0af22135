"""Measurement-setting families, Fourier decomposition and shot estimation.

Two setting families are supported:

* ``FULL``: the computational basis plus ``n + 1`` products of
  ``cos(a_k) X + sin(a_k) Y`` with ``a_k = k pi / (n + 1)``;
* ``EFFICIENT``: the computational basis, ``X...X`` and ``Y X...X``.

Shots are stored as ``(shots, n)`` arrays of +-1 signs, qubit 1 first.  The
JSONL shot format writes each record as
``{"setting": "XY:3", "n": 5, "seed": 7, "outcomes": ["+-+-+", ...]}``.
"""
from __future__ import annotations

import enum
import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .states import (
    DiagonalStats,
    MeasurementSetting,
    PreparedState,
    SettingKind,
    diagonal_stats,
    expectation_exact,
    outcome_distribution,
    signs_to_string,
)

RNG_CONTRACT = "numpy-PCG64/SeedSequence(seed, spawn_key=(crc32(setting name),))/v1"


class IncompleteDataError(ValueError):
    """A setting required by the requested analysis has no data."""

    def __init__(self, setting: str, message: str | None = None):
        self.setting = setting
        super().__init__(message or f"missing data for setting {setting!r}")


class Protocol(enum.Enum):
    FULL = "full"
    EFFICIENT = "efficient"


def settings(protocol: Protocol, n: int) -> list[MeasurementSetting]:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if protocol is Protocol.FULL:
        return [MeasurementSetting.z(n)] + [MeasurementSetting.xy(n, k) for k in range(n + 1)]
    return [MeasurementSetting.z(n), MeasurementSetting.x_all(n), MeasurementSetting.y_x_rest(n)]


@dataclass(frozen=True)
class DecompositionCoefficients:
    """Weights expressing the |0..0><1..1| coherences through the XY settings.

    ``X_+ = sum_k c_plus[k] M_k`` and ``X_- = sum_k c_minus[k] M_k``; the
    complex ``f_plus``/``f_minus`` are the discrete Fourier coefficients of
    the weight profiles ``[1, 0, ..., 0, +-1]`` of the phase-shifted settings
    ``exp(i n a_k) M_k``.
    """

    n: int
    angles: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray


def dft_coefficients(n: int) -> DecompositionCoefficients:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(n + 1)
    angles = k * np.pi / (n + 1)
    sign = (-1.0) ** k
    twiddle = np.exp(-2j * np.pi * k * n / (n + 1))
    return DecompositionCoefficients(
        n=n,
        angles=angles,
        c_plus=sign * np.cos(angles) / (n + 1),
        c_minus=-sign * np.sin(angles) / (n + 1),
        f_plus=(1 + twiddle) / (n + 1),
        f_minus=(1 - twiddle) / (n + 1),
    )


@dataclass(frozen=True, eq=False)
class ShotRecord:
    setting: MeasurementSetting
    outcomes: np.ndarray  # (shots, n) int8 signs
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.outcomes, dtype=np.int8)
        if arr.ndim != 2 or arr.shape[1] != self.setting.n:
            raise ValueError(f"outcomes must have shape (shots, {self.setting.n}), got {arr.shape}")
        if arr.size and not np.all(np.abs(arr) == 1):
            raise ValueError("outcomes must be +1/-1 signs")
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", arr)

    @property
    def n(self) -> int:
        return self.setting.n

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    def strings(self) -> list[str]:
        return [signs_to_string(row) for row in self.outcomes]

    def __eq__(self, other):
        if not isinstance(other, ShotRecord):
            return NotImplemented
        return (
            self.setting == other.setting
            and self.seed == other.seed
            and np.array_equal(self.outcomes, other.outcomes)
        )

    def to_json(self) -> str:
        return json.dumps(
            {"setting": self.setting.name, "n": self.n, "seed": self.seed, "outcomes": self.strings()},
            separators=(",", ":"),
        )

    @classmethod
    def from_dict(cls, obj: Mapping) -> "ShotRecord":
        for key in ("setting", "n", "seed", "outcomes"):
            if key not in obj:
                raise ValueError(f"missing field {key!r}")
        n = int(obj["n"])
        setting = MeasurementSetting.from_name(obj["setting"], n)
        rows = obj["outcomes"]
        table = np.frombuffer("".join(rows).encode("ascii"), dtype=np.uint8) if rows else np.zeros(0, np.uint8)
        if any(len(r) != n for r in rows):
            raise ValueError(f"every outcome string must have length {n}")
        if table.size and not np.all((table == ord("+")) | (table == ord("-"))):
            raise ValueError("outcome strings must use only '+' and '-'")
        signs = np.where(table == ord("+"), 1, -1).astype(np.int8).reshape(len(rows), n)
        return cls(setting, signs, int(obj["seed"]))


def setting_stream(seed: int, setting: MeasurementSetting) -> np.random.Generator:
    """Generator for one setting, derived from the master seed and the setting name."""
    key = zlib.crc32(setting.name.encode("ascii"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def sample_shots(state: PreparedState, setting: MeasurementSetting, shots: int, seed: int) -> ShotRecord:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = setting_stream(seed, setting)
    outcomes = outcome_distribution(state, setting).sample(shots, rng)
    return ShotRecord(setting, outcomes, seed)


def sample_protocol(
    state: PreparedState, protocol: Protocol, shots: int | Mapping[str, int], seed: int
) -> list[ShotRecord]:
    """Sample every setting of ``protocol``; ``shots`` may map setting names to counts."""
    records = []
    for s in settings(protocol, state.n):
        count = shots[s.name] if isinstance(shots, Mapping) else shots
        records.append(sample_shots(state, s, count, seed))
    return records


def write_jsonl(records: Iterable[ShotRecord], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for r in records:
            fh.write(r.to_json())
            fh.write("\n")


def read_jsonl(path) -> list[ShotRecord]:
    records = []
    n = None
    for lineno, line in enumerate(Path(path).read_text(encoding="ascii").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = ShotRecord.from_dict(json.loads(line))
        except (ValueError, TypeError, KeyError) as exc:
            raise ValueError(f"{path}:{lineno}: malformed shot record: {exc}") from exc
        if n is None:
            n = rec.n
        elif rec.n != n:
            raise ValueError(f"{path}:{lineno}: record has n={rec.n}, earlier records have n={n}")
        records.append(rec)
    return records


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    shots: int = 0


def _mean_and_sem(x: np.ndarray) -> tuple[float, float]:
    m = float(x.mean())
    sem = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return m, sem


@dataclass(frozen=True)
class ExpectationSet:
    """Per-setting parity means plus computational-basis statistics.

    ``diagonal_cov`` is the covariance of the estimates ``(z0, z1, mz)``,
    which come from the same shots.  Exact sets carry zero errors and
    ``shots == 0``.
    """

    n: int
    values: dict[str, Estimate] = field(default_factory=dict)
    diagonal: DiagonalStats | None = None
    diagonal_cov: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    @property
    def exact(self) -> bool:
        return all(e.shots == 0 for e in self.values.values())

    def has(self, setting: MeasurementSetting | str) -> bool:
        name = setting if isinstance(setting, str) else setting.name
        return name in self.values

    def get(self, setting: MeasurementSetting | str) -> Estimate:
        name = setting if isinstance(setting, str) else setting.name
        if name not in self.values:
            raise IncompleteDataError(name)
        return self.values[name]

    def require_diagonal(self) -> DiagonalStats:
        if self.diagonal is None:
            raise IncompleteDataError("Z")
        return self.diagonal

    def require(self, protocol: Protocol) -> None:
        for s in settings(protocol, self.n):
            self.get(s)
        self.require_diagonal()

    def vector(self, protocol: Protocol) -> tuple[np.ndarray, np.ndarray]:
        """Flat means ``[z0, z1, mz, <M_1>, ...]`` over the protocol's settings and their covariance."""
        self.require(protocol)
        d = self.diagonal
        rest = [self.get(s) for s in settings(protocol, self.n)[1:]]
        x = np.array([d.z0, d.z1, d.mz] + [e.value for e in rest])
        cov = np.zeros((x.size, x.size))
        cov[:3, :3] = self.diagonal_cov
        cov[3:, 3:] = np.diag([e.stderr ** 2 for e in rest])
        return x, cov

    def x_pm(self) -> tuple[Estimate, Estimate]:
        """``<X_+>`` and ``<X_->`` from the full family, errors added in quadrature."""
        coeffs = dft_coefficients(self.n)
        ests = [self.get(MeasurementSetting.xy(self.n, k)) for k in range(self.n + 1)]
        vals = np.array([e.value for e in ests])
        var = np.array([e.stderr ** 2 for e in ests])
        shots = sum(e.shots for e in ests)
        xp = Estimate(float(coeffs.c_plus @ vals), float(math.sqrt(coeffs.c_plus ** 2 @ var)), shots)
        xm = Estimate(float(coeffs.c_minus @ vals), float(math.sqrt(coeffs.c_minus ** 2 @ var)), shots)
        return xp, xm


def exact_expectations(state: PreparedState, protocol: Protocol | None = None) -> ExpectationSet:
    """Exact values for every setting of ``protocol`` (both families when None)."""
    if protocol is None:
        sets = settings(Protocol.FULL, state.n) + settings(Protocol.EFFICIENT, state.n)[1:]
    else:
        sets = settings(protocol, state.n)
    values = {s.name: Estimate(expectation_exact(state, s)) for s in sets}
    return ExpectationSet(state.n, values, diagonal_stats(state))


def estimate_expectations(records: Iterable[ShotRecord]) -> ExpectationSet:
    """Sample means and Bessel-corrected standard errors per setting.

    Several records for the same setting are pooled.
    """
    grouped: dict[str, list[ShotRecord]] = {}
    n = None
    for r in records:
        if n is None:
            n = r.n
        elif r.n != n:
            raise ValueError(f"records mix n={n} and n={r.n}")
        grouped.setdefault(r.setting.name, []).append(r)
    if n is None:
        raise IncompleteDataError("Z", "no shot records given")

    values: dict[str, Estimate] = {}
    diagonal = None
    cov = np.zeros((3, 3))
    for name, recs in grouped.items():
        signs = np.concatenate([r.outcomes for r in recs], axis=0)
        parity = np.prod(signs, axis=1, dtype=np.int64).astype(float)
        m, sem = _mean_and_sem(parity)
        values[name] = Estimate(m, sem, parity.size)
        if recs[0].setting.kind is SettingKind.Z:
            per_shot = np.stack(
                [np.all(signs > 0, axis=1), np.all(signs < 0, axis=1), signs[:, 0]], axis=0
            ).astype(float)
            means = per_shot.mean(axis=1)
            diagonal = DiagonalStats(*(float(v) for v in means))
            if parity.size > 1:
                cov = np.cov(per_shot, ddof=1) / parity.size
    return ExpectationSet(n, values, diagonal, cov)
