"""Run configuration files: ``key = value`` lines with optional ``[section]`` headers.

Sections only group keys for readability; every key has a single global
meaning.  Comments start with ``#`` or ``;``.  Unknown keys, bad values and
out-of-range settings are reported with their line number.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .cases import CASES, CaseConfig
from .reconstruction import MODES, PROJECTIONS, ReconConfig

DISCONTINUOUS = ("sod3d", "rayleigh_taylor")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


def _int(s):
    return int(s)


def _float(s):
    return float(s)


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _shape(s):
    parts = [int(p) for p in s.replace("x", ",").split(",") if p.strip()]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3 or min(parts) < 1:
        raise ValueError(f"grid size must be one or three positive integers, got {s!r}")
    return tuple(parts)


def _choice(options):
    def conv(s):
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {s!r}")
        return s
    return conv


# key -> (converter, validity check or None)
CASE_KEYS = {
    "case": (_choice(CASES), None),
    "n": (_shape, None),
    "gamma": (_float, lambda v: 1.0 < v <= 5.0 / 3.0 + 1e-12),
    "re": (_float, lambda v: v > 0),
    "mach": (_float, lambda v: v > 0),
    "pr": (_float, lambda v: v > 0),
    "atwood": (_float, lambda v: 0 < v < 1),
    "gravity": (_float, None),
    "amplitude": (_float, None),
    "interface_pressure": (_float, lambda v: v > 0),
    "ramp_cells": (_float, lambda v: v >= 0),
    "a0": (_float, lambda v: v > 0),
    "k0": (_float, lambda v: v > 0),
    "re_lambda": (_float, lambda v: v > 0),
    "ma_t": (_float, lambda v: v > 0),
    "seed": (_int, lambda v: v >= 0),
    "lid_mach": (_float, lambda v: v > 0),
    "t_end": (_float, lambda v: v > 0),
}
RUN_KEYS = {
    "recon": (_choice(MODES), None),
    "projection": (_choice(PROJECTIONS), None),
    "weno_epsilon": (_float, lambda v: v > 0),
    "positivity_fallback": (_bool, None),
    "tau_eps": (_float, lambda v: v >= 0),
    "tau_c": (_float, lambda v: v >= 0),
    "cfl": (_float, lambda v: 0 < v < 1),
    "output_every": (_int, lambda v: v > 0),
    "output_interval": (_float, lambda v: v > 0),
    "diagnostics_every": (_int, lambda v: v > 0),
    "checkpoint_every": (_int, lambda v: v > 0),
    "field_format": (_choice(("vtk", "raw", "none")), None),
    "output_dir": (str, None),
    "threads": (_int, lambda v: v > 0),
    "max_steps": (_int, lambda v: v > 0),
    "skewness_averaged": (_bool, None),
}
KEYS = {**CASE_KEYS, **RUN_KEYS}


@dataclass
class RunConfig:
    case: CaseConfig
    recon: ReconConfig
    tau_eps: float = 0.01
    tau_c: float = 1.0
    cfl: float = 0.4
    t_end: float = 1.0
    output_every: int | None = None
    output_interval: float | None = None
    diagnostics_every: int = 10
    checkpoint_every: int | None = None
    field_format: str = "vtk"
    output_dir: str = "output"
    threads: int = 1
    max_steps: int | None = None
    skewness_averaged: bool = False
    source: dict = field(default_factory=dict)


def parse_lines(text: str):
    """Yield (line number, key, raw value); rejects malformed lines and duplicates."""
    seen = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", no)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", no, key)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", no, key)
        seen[key] = no
        yield no, key, value


def _convert(no, key, value):
    conv, check = KEYS[key]
    try:
        v = conv(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}", no, key) from None
    if check is not None and not check(v):
        raise ConfigError(f"{key} = {value} is out of range", no, key)
    return v


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a configuration text; ``overrides`` win over file values."""
    values, lines = {}, {}
    for no, key, raw in parse_lines(text):
        values[key] = _convert(no, key, raw)
        lines[key] = no
    for key, v in (overrides or {}).items():
        if v is None:
            continue
        _, check = KEYS[key]
        if check is not None and not check(v):
            raise ConfigError(f"{key} = {v} is out of range (command line)", key=key)
        values[key] = v
    if "case" not in values:
        raise ConfigError("missing required key 'case'")
    case_id = values["case"]

    case_kw = {k: v for k, v in values.items() if k in CASE_KEYS}
    try:
        case = CaseConfig(**case_kw)
    except ValueError as exc:
        raise ConfigError(str(exc), lines.get("case")) from None
    if case_id == "hit" and case.n[0] % 2:
        raise ConfigError("hit needs an even grid size", lines.get("n"), "n")
    if case_id == "hit" and case.n[0] // 2 < 2 * case.k0:
        raise ConfigError(f"hit grid too coarse: max wavenumber {case.n[0] // 2} < 2 k0 = {2 * case.k0:g}",
                          lines.get("n"), "n")
    if case_id == "custom":
        raise ConfigError("case 'custom' has no built-in initializer; use the Python API", lines.get("case"), "case")

    recon = ReconConfig(
        mode=values.get("recon", "weno5_js"),
        projection=values.get("projection", "characteristic" if case_id in DISCONTINUOUS else "component"),
        weno_epsilon=values.get("weno_epsilon", 1e-6),
        positivity_fallback=values.get("positivity_fallback", True),
    )
    threads = values.get("threads", int(os.environ.get("GKS4_THREADS", "1") or 1))
    return RunConfig(
        case=case,
        recon=recon,
        tau_eps=values.get("tau_eps", 0.01),
        tau_c=values.get("tau_c", 1.0),
        cfl=values.get("cfl", 0.4),
        t_end=case.t_end,
        output_every=values.get("output_every"),
        output_interval=values.get("output_interval"),
        diagnostics_every=values.get("diagnostics_every", 10),
        checkpoint_every=values.get("checkpoint_every"),
        field_format=values.get("field_format", "vtk"),
        output_dir=values.get("output_dir", "output"),
        threads=threads,
        max_steps=values.get("max_steps"),
        skewness_averaged=values.get("skewness_averaged", False),
        source=values,
    )
