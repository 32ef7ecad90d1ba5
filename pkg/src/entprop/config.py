"""Experiment configuration parsing/validation and the acceptance-report model."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

SCHEMA_VERSION = 1


def load_schema() -> dict:
    with resources.files("entprop").joinpath("schema.json").open() as fh:
        return json.load(fh)


def parse_config_text(text: str) -> tuple[dict[str, str], list[str]]:
    """Split ``key = value`` lines into a raw map; malformed lines become violations."""
    raw, problems = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            problems.append(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw, problems


def _split(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    text = str(value).strip()
    return [] if not text else [v.strip() for v in text.split(",")]


def _scalar(kind: str, value):
    if kind == "bool":
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("true", "yes", "1", "on"):
            return True
        if text in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    if kind == "int":
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"not an integer: {value!r}")
        return int(str(value).strip()) if not isinstance(value, (int, float)) else int(value)
    if kind in ("float", "angle"):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"not finite: {value!r}")
        return v
    return str(value).strip()


def _default(spec):
    d = spec.get("default")
    if d == "linspace(0, 1, 41)":
        return [float(x) for x in np.linspace(0, 1, 41)]
    return list(d) if isinstance(d, list) else d


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed configuration. Angles are stored in radians."""

    values: Mapping[str, Any]

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def lambdas(self) -> list[float]:
        return self.values["lambda"]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return ExperimentConfig({**self.values, **kw})


def validate_config(raw: Mapping[str, Any], schema: dict | None = None) -> tuple[ExperimentConfig | None, list[str]]:
    """Check every key against the schema and collect all violations.

    Returns ``(config, [])`` on success or ``(None, violations)``. Never raises.
    """
    violations: list[str] = []
    try:
        schema = schema or load_schema()
        keys = schema["keys"]
    except Exception as exc:  # schema itself unreadable
        return None, [f"schema unavailable: {exc}"]
    if not isinstance(raw, Mapping):
        return None, [f"configuration must be a key-value map, got {type(raw).__name__}"]

    values: dict[str, Any] = {}
    for key in raw:
        if key not in keys:
            violations.append(f"unknown key {key!r}")
    for key, spec in keys.items():
        if key not in raw or raw[key] is None:
            values[key] = _default(spec)
            continue
        kind = spec["type"]
        is_list = kind.endswith("_list")
        base = kind[:-5] if is_list else kind
        try:
            items = _split(raw[key]) if is_list else [raw[key]]
            parsed = [_scalar(base, v) for v in items]
        except (TypeError, ValueError) as exc:
            violations.append(f"{key}: cannot parse as {kind} ({exc})")
            continue
        ok = True
        for v in parsed:
            if "choices" in spec and v not in spec["choices"]:
                violations.append(f"{key}: {v!r} not one of {spec['choices']}")
                ok = False
            if "min" in spec and v < spec["min"]:
                violations.append(f"{key}: {v} below minimum {spec['min']}")
                ok = False
            if "max" in spec and v > spec["max"]:
                violations.append(f"{key}: {v} above maximum {spec['max']}")
                ok = False
        if is_list and not parsed and spec.get("default"):
            violations.append(f"{key}: list must not be empty")
            ok = False
        if ok:
            values[key] = parsed if is_list else parsed[0]

    # cross-key checks
    if values.get("scheme") == "unidirectional" and values.get("m", 0) not in (0, None):
        violations.append("m: unidirectional scheme requires m = 0")
    n, m = values.get("n"), values.get("m")
    if isinstance(n, int) and isinstance(m, int) and n + m > 4:
        violations.append(f"n + m = {n + m} exceeds the enumeration limit of 4")
    outs = values.get("outcomes")
    if outs and isinstance(n, int) and isinstance(m, int) and len(outs) != n + m:
        violations.append(f"outcomes: length {len(outs)} does not match n + m = {n + m}")

    if violations:
        return None, violations
    for key, spec in keys.items():
        if spec["type"] == "angle" and values[key] is not None:
            values[key] = values[key] * math.pi
    return ExperimentConfig(values), []


def load_config(path: str | Path | None, overrides: Mapping[str, Any] | None = None):
    """Read, parse and validate a config file; ``path=None`` gives pure defaults."""
    raw: dict[str, Any] = {}
    problems: list[str] = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            return None, [f"cannot read config {path}: {exc}"]
        raw, problems = parse_config_text(text)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg, violations = validate_config(raw)
    if problems:
        return None, problems + violations
    return cfg, violations


# -- acceptance report -------------------------------------------------------

@dataclass
class AcceptanceRecord:
    criterion: int
    title: str
    expected: str
    measured: str
    tolerance: str
    status: str  # pass | fail | skipped
    runtime: float = 0.0
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def machine_line(self) -> str:
        return (f"ACCEPT id={self.criterion} status={self.status} measured={self.measured!r} "
                f"expected={self.expected!r} tolerance={self.tolerance!r}")


def format_report(records: list[AcceptanceRecord], with_runtime: bool = False) -> str:
    lines = [f"acceptance report (schema v{SCHEMA_VERSION})", ""]
    for r in records:
        head = f"[{r.status.upper():4}] {r.criterion:2d}. {r.title}"
        if with_runtime:
            head += f"  ({r.runtime:.1f} s)"
        lines.append(head)
        lines.append(f"       expected: {r.expected}")
        lines.append(f"       measured: {r.measured}")
        lines.append(f"       tolerance: {r.tolerance}")
        lines += [f"       {d}" for d in r.details]
    n_pass = sum(r.passed for r in records)
    lines += ["", f"{n_pass}/{len(records)} criteria pass", ""]
    lines += [r.machine_line() for r in records]
    return "\n".join(lines) + "\n"
