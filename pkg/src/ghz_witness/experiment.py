"""Experiment runs, offline analysis and parameter sweeps.

Configurations are YAML mappings (see ``README.md`` for the schema); angles
may be given as numbers in radians or as multiples of pi such as ``pi/4``,
``-3pi/4`` or ``0.5*pi``.
"""
from __future__ import annotations

import csv
import json
import math
import re
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from itertools import product as iproduct
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from . import __version__
from .protocol import (
    RNG_CONTRACT,
    IncompleteDataError,
    Protocol,
    ShotRecord,
    estimate_expectations,
    exact_expectations,
    read_jsonl,
    sample_protocol,
    settings,
    write_jsonl,
)
from .states import CoherentParams, PreparedState
from .witness import (
    DEFAULT_SIGNIFICANCE,
    DetectionReport,
    Family,
    evaluate,
    gap_functions,
    threshold_by_bisection,
    tolerance,
)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str, line: int | None = None):
        self.field = field_name
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"config field {field_name!r}{where}: {message}")


_ANGLE_RE = re.compile(r"^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(value: Any) -> float:
    """Radians from a number or a string such as ``"pi/4"`` or ``"-3*pi/2"``."""
    if isinstance(value, bool):
        raise ValueError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    m = _ANGLE_RE.match(text)
    if m:
        sign, mult, div = m.groups()
        out = (float(mult) if mult else 1.0) * math.pi / (float(div) if div else 1.0)
        return -out if sign == "-" else out
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not an angle: {value!r}") from None


_WITNESS_FAMILIES = {
    ("full", "phi"): Family.FULL_PHI,
    ("full", "phi-theta"): Family.FULL_PHI_THETA,
    ("efficient", "phi"): Family.EFFICIENT_PHI,
    ("efficient", "phi-theta"): Family.EFFICIENT_PHI_THETA,
}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 4
    theta: float = math.pi / 4
    phi: float = 0.0
    p: float = 0.0
    protocol: str = "full"
    witness: str = "phi"
    mode: str = "exact"
    shots: int = 10000
    seed: int = 0
    significance: float = DEFAULT_SIGNIFICANCE
    report: str | None = None
    shots_out: str | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("n", f"must be >= 2, got {self.n}")
        try:
            CoherentParams(self.theta, self.phi)
        except ValueError as exc:
            raise ConfigError("theta", str(exc)) from None
        if not 0 <= self.p <= 1:
            raise ConfigError("p", f"must lie in [0, 1], got {self.p}")
        if self.protocol not in ("full", "efficient", "baseline"):
            raise ConfigError("protocol", f"must be full, efficient or baseline, got {self.protocol!r}")
        if self.witness not in ("phi", "phi-theta"):
            raise ConfigError("witness", f"must be phi or phi-theta, got {self.witness!r}")
        if self.mode not in ("exact", "sampled"):
            raise ConfigError("mode", f"must be exact or sampled, got {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ConfigError("shots", f"must be >= 1 in sampled mode, got {self.shots}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be non-negative, got {self.seed}")
        if self.significance < 0:
            raise ConfigError("significance", f"must be non-negative, got {self.significance}")

    @property
    def family(self) -> Family:
        if self.protocol == "baseline":
            return Family.BASELINE
        return _WITNESS_FAMILIES[(self.protocol, self.witness)]

    def state(self) -> PreparedState:
        return PreparedState.from_angles(self.n, self.theta, self.phi, self.p)


_FIELD_PARSERS = {
    "n": int,
    "theta": parse_angle,
    "phi": parse_angle,
    "p": float,
    "protocol": str,
    "witness": str,
    "mode": str,
    "shots": int,
    "seed": int,
    "significance": float,
    "report": str,
    "shots_out": str,
}


def _key_lines(text: str) -> dict[str, int]:
    """1-based line of each top-level key in a YAML document."""
    node = yaml.compose(text)
    if node is None or not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value}


def _read_yaml(path) -> tuple[dict, dict[str, int]]:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text) or {}
        lines = _key_lines(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError("<file>", str(exc).splitlines()[0], mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise ConfigError("<file>", "top level must be a mapping", 1)
    return data, lines


def _coerce(parsers: Mapping[str, Any], raw: Mapping[str, Any], lines: Mapping[str, int]) -> dict:
    out = {}
    for key, value in raw.items():
        if key not in parsers:
            raise ConfigError(key, "unknown field", lines.get(key))
        if value is None:
            out[key] = None
            continue
        try:
            out[key] = parsers[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc), lines.get(key)) from None
    return out


def load_config(path=None, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """Experiment config from a YAML file, with ``overrides`` (e.g. CLI flags) winning."""
    raw, lines = _read_yaml(path) if path is not None else ({}, {})
    values = _coerce(_FIELD_PARSERS, raw, lines)
    values.update(_coerce(_FIELD_PARSERS, {k: v for k, v in (overrides or {}).items() if v is not None}, {}))
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        raise ConfigError(exc.field, str(exc).split(": ", 1)[1], lines.get(exc.field)) from None


def _seeds_block(seed: int, records: list[ShotRecord]) -> dict:
    return {
        "master": seed,
        "rng": RNG_CONTRACT,
        "streams": {r.setting.name: zlib.crc32(r.setting.name.encode("ascii")) for r in records},
    }


def report_document(report: DetectionReport, config: Mapping, seeds: Mapping | None) -> dict:
    doc = report.to_dict()
    doc["config"] = dict(config)
    doc["seeds"] = dict(seeds) if seeds is not None else None
    doc["version"] = __version__
    return doc


def write_json(doc: Mapping, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def sample(config: ExperimentConfig) -> list[ShotRecord]:
    """Shots for every setting of the configured protocol; written to ``shots_out`` if set."""
    records = sample_protocol(config.state(), config.family.protocol, config.shots, config.seed)
    if config.shots_out:
        write_jsonl(records, config.shots_out)
    return records


def run(config: ExperimentConfig) -> dict:
    """Prepare, measure (exactly or by sampling), evaluate; returns the report document."""
    family = config.family
    seeds = None
    if config.mode == "exact":
        es = exact_expectations(config.state(), family.protocol)
    else:
        records = sample(config)
        es = estimate_expectations(records)
        seeds = _seeds_block(config.seed, records)
    report = evaluate(family, es, config.significance)
    doc = report_document(report, asdict(config), seeds)
    if config.report:
        write_json(doc, config.report)
    return doc


def detect_protocol(records: list[ShotRecord]) -> Protocol:
    """Full when XY settings are present, efficient otherwise; raises when data are missing."""
    if not records:
        raise IncompleteDataError("Z", "shot file contains no records")
    n = records[0].n
    names = {r.setting.name for r in records}
    protocol = Protocol.FULL if any(nm.startswith("XY:") for nm in names) else Protocol.EFFICIENT
    for s in settings(protocol, n):
        if s.name not in names:
            raise IncompleteDataError(s.name)
    return protocol


def analyze(path, witness: str = "phi", significance: float = DEFAULT_SIGNIFICANCE, report: str | None = None) -> dict:
    """Evaluate a JSONL shot file; ``witness`` is ``phi``, ``phi-theta`` or ``baseline``."""
    records = read_jsonl(path)
    protocol = detect_protocol(records)
    if witness == "baseline":
        if protocol is not Protocol.FULL:
            raise IncompleteDataError("XY:0", "baseline witness needs the full setting family")
        family = Family.BASELINE
    else:
        family = _WITNESS_FAMILIES[(protocol.value, witness)]
    es = estimate_expectations(records)
    seeds = sorted({r.seed for r in records})
    seeds_block = _seeds_block(seeds[0], records) if len(seeds) == 1 else {"master": seeds, "rng": RNG_CONTRACT}
    config = {"source": str(path), "witness": witness, "significance": significance, "protocol": protocol.value}
    doc = report_document(evaluate(family, es, significance), config, seeds_block)
    if report:
        write_json(doc, report)
    return doc


# -- sweeps

@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigError("steps", f"must be >= 2, got {self.steps}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def parse_range(value: Any) -> Range | float:
    """A ``{start, stop, steps}`` mapping, or a scalar angle for a fixed value."""
    if isinstance(value, Mapping):
        missing = {"start", "stop", "steps"} - set(value)
        if missing:
            raise ValueError(f"range needs {sorted(missing)}")
        return Range(parse_angle(value["start"]), parse_angle(value["stop"]), int(value["steps"]))
    return parse_angle(value)


FIG3_THETAS = (math.pi / 4, math.pi / 6, math.pi / 12)
FIG3_COLUMNS = ("theta", "phi", "p_eq13_or_19", "p_finite_N")
FIG45_COLUMNS = ("theta", "p_eq31", "p_eq33", "gap_g")


@dataclass(frozen=True)
class SweepConfig:
    preset: str = "fig3"
    n: int = 20
    theta: Range | float | None = None
    phi: Range | float | None = None
    p: Range | float | None = None
    family: str = "full-phi"
    bisect: bool = False
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.preset not in ("fig3", "fig4-5", "tolerance-map", "custom"):
            raise ConfigError("preset", f"unknown preset {self.preset!r}")
        if self.n < 2:
            raise ConfigError("n", f"must be >= 2, got {self.n}")
        try:
            Family(self.family)
        except ValueError:
            raise ConfigError("family", f"unknown family {self.family!r}") from None
        for name in ("theta", "phi", "p"):
            r = getattr(self, name)
            if isinstance(r, Range) and r.start == r.stop:
                raise ConfigError(name, "range is empty")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")


def _parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


_SWEEP_PARSERS = {
    "preset": str,
    "n": int,
    "theta": parse_range,
    "phi": parse_range,
    "p": parse_range,
    "family": str,
    "bisect": _parse_bool,
    "output": str,
    "workers": int,
}


def load_sweep_config(path=None, overrides: Mapping[str, Any] | None = None) -> SweepConfig:
    raw, lines = _read_yaml(path) if path is not None else ({}, {})
    values = _coerce(_SWEEP_PARSERS, raw, lines)
    values.update(_coerce(_SWEEP_PARSERS, {k: v for k, v in (overrides or {}).items() if v is not None}, {}))
    try:
        return SweepConfig(**values)
    except ConfigError as exc:
        raise ConfigError(exc.field, str(exc).split(": ", 1)[1], lines.get(exc.field)) from None


def _as_values(r: Range | float | None, default: Range) -> np.ndarray:
    if r is None:
        r = default
    return r.values() if isinstance(r, Range) else np.array([r])


def _fig3_row(point, n, bisect_on):
    theta, phi = point
    tol = tolerance(Family.BASELINE, theta, n, phi)
    row = [theta, phi, tol.asymptotic, tol.finite_n]
    if bisect_on:
        row.append(threshold_by_bisection(Family.BASELINE, n, theta, phi))
    return row


def _fig45_row(theta, n, bisect_on):
    g, _ = gap_functions(theta)
    row = [theta, tolerance(Family.FULL_PHI_THETA, theta).asymptotic, tolerance(Family.FULL_PHI, theta).asymptotic, g]
    if bisect_on:
        row += [threshold_by_bisection(Family.FULL_PHI_THETA, n, theta), threshold_by_bisection(Family.FULL_PHI, n, theta)]
    return row


_MAP_FAMILIES = (Family.FULL_PHI, Family.FULL_PHI_THETA, Family.EFFICIENT_PHI, Family.EFFICIENT_PHI_THETA)


def _map_row(theta, n, bisect_on):
    row = [theta, n]
    for fam in _MAP_FAMILIES:
        tol = tolerance(fam, theta, n)
        row += [tol.asymptotic, tol.finite_n]
        if bisect_on:
            row.append(threshold_by_bisection(fam, n, theta))
    row += list(gap_functions(theta))
    return row


def _custom_row(point, n, family):
    theta, phi, p = point
    fam = Family(family)
    r = evaluate(fam, exact_expectations(PreparedState.from_angles(n, theta, phi, p), fam.protocol))
    return [theta, phi, p, r.witness_value, int(r.entangled)]


def sweep_rows(config: SweepConfig) -> tuple[list[str], list[list]]:
    """Header and rows of a sweep, in deterministic order."""
    n, b = config.n, config.bisect
    if config.preset == "fig3":
        phis = _as_values(config.phi, Range(-math.pi / 2, math.pi / 2, 61))
        thetas = _as_values(config.theta, None) if config.theta is not None else np.array(FIG3_THETAS)
        header = list(FIG3_COLUMNS) + (["p_bisect"] if b else [])
        points, fn = list(iproduct(thetas, phis)), partial(_fig3_row, n=n, bisect_on=b)
    elif config.preset == "fig4-5":
        thetas = _as_values(config.theta, Range(0.0, math.pi / 2, 91))
        header = list(FIG45_COLUMNS) + (["p_bisect_eq31", "p_bisect_eq33"] if b else [])
        points, fn = list(thetas), partial(_fig45_row, n=n, bisect_on=b)
    elif config.preset == "tolerance-map":
        thetas = _as_values(config.theta, Range(0.0, math.pi / 2, 91))
        header = ["theta", "n"]
        for fam in _MAP_FAMILIES:
            key = fam.value.replace("-", "_")
            header += [f"{key}_asymptotic", f"{key}_finite_N"] + ([f"{key}_bisect"] if b else [])
        header += ["gap_g", "gap_l"]
        points, fn = list(thetas), partial(_map_row, n=n, bisect_on=b)
    else:
        thetas = _as_values(config.theta, Range(0.0, math.pi / 2, 11))
        phis = _as_values(config.phi, Range(-math.pi, math.pi, 9))
        ps = _as_values(config.p, Range(0.0, 1.0, 11))
        header = ["theta", "phi", "p", "witness_value", "entangled"]
        points, fn = list(iproduct(thetas, phis, ps)), partial(_custom_row, n=n, family=config.family)

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(fn, points, chunksize=max(1, len(points) // (4 * config.workers))))
    else:
        rows = [fn(pt) for pt in points]
    return header, rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def sweep(config: SweepConfig, output=None) -> Path:
    """Write the sweep CSV and return its path."""
    output = output or config.output or f"{config.preset}.csv"
    header, rows = sweep_rows(config)
    with open(output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return Path(output)
