"""Experiment configuration: one INI document, strictly validated.

Sections and keys are fixed per experiment kind; anything unknown is an
error, as is a missing required key.  Values are parsed eagerly so a typo
fails before any work starts.  The parsed, defaulted configuration is
hashed (sha256 over a canonical text form) and that hash is stamped into
every artifact the run writes.  Output directory and worker count are
excluded from the hash on purpose: neither may influence results.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ioutil import format_float

__all__ = ["ExperimentConfig", "load_config", "default_config", "export_config", "KINDS"]

_REQUIRED = object()


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_int(s: str) -> int:
    return int(s.strip())


def _parse_float(s: str) -> float:
    return float(s.strip())


def _parse_ints(s: str) -> tuple[int, ...]:
    return tuple(int(p.strip()) for p in s.split(",") if p.strip())


def _parse_floats(s: str) -> tuple[float, ...]:
    return tuple(float(p.strip()) for p in s.split(",") if p.strip())


def _parse_grid(s: str) -> tuple[float, ...]:
    """Either an explicit comma list or 'linspace:<lo>:<hi>:<count>'."""
    s = s.strip()
    if s.startswith("linspace:"):
        parts = s.split(":")
        if len(parts) != 4:
            raise ValueError(f"bad linspace spec {s!r}")
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        return tuple(float(v) for v in np.linspace(lo, hi, count))
    return _parse_floats(s)


def _parse_str(s: str) -> str:
    return s.strip()


# Schema: kind -> section -> key -> (parser, default).  _REQUIRED marks keys
# that must appear explicitly.
_TRAIN_KEYS = {
    "learning_rate": (_parse_float, 1e-3),
    "batch_size": (_parse_int, 100),
    "epochs": (_parse_int, _REQUIRED),
    "reg_type": (_parse_str, "l2"),
    "reg_strength": (_parse_float, 0.0),
    "validation_fraction": (_parse_float, 0.2),
}

_REPORT_KEYS = {
    "figures": (_parse_bool, True),
    "save_histories": (_parse_bool, True),
    "save_datasets": (_parse_bool, False),
}

_SCHEMA: dict[str, dict[str, dict]] = {
    "family": {
        "model": {"hidden": (_parse_ints, _REQUIRED), "bias": (_parse_bool, True)},
        "train": dict(_TRAIN_KEYS),
        "data": {
            "d": (_parse_int, 2),
            "n": (_parse_int, _REQUIRED),
            "alphas": (_parse_grid, _REQUIRED),
            "betas": (_parse_floats, _REQUIRED),
            "trials": (_parse_int, 1),
        },
        "report": dict(_REPORT_KEYS),
    },
    "teacher": {
        "model": {"hidden": (_parse_ints, _REQUIRED), "bias": (_parse_bool, False)},
        "train": dict(_TRAIN_KEYS),
        "data": {"d": (_parse_int, _REQUIRED), "n": (_parse_int, _REQUIRED)},
        "prune": {"threshold_pct": (_parse_float, 5.0)},
        "report": dict(_REPORT_KEYS),
    },
    "verify": {
        "verify": {
            "max_b": (_parse_int, 6),
            "trials": (_parse_int, 100),
            "max_size": (_parse_int, 8),
            "binomial_max_b": (_parse_int, 25),
        },
    },
    "gradcheck": {
        "gradcheck": {
            "configs": (_parse_int, 50),
            "eps": (_parse_float, 1e-6),
            "max_b": (_parse_int, 3),
            "max_size": (_parse_int, 5),
        },
    },
    "paramcount": {
        "paramcount": {
            "widths": (_parse_ints, (100,)),
            "depths": (_parse_ints, tuple(range(2, 11))),
        },
    },
    "export": {
        "export": {
            "checkpoint": (_parse_str, _REQUIRED),
            "threshold": (_parse_float, 0.0),
        },
    },
}

_EXPERIMENT_KEYS = {
    "kind": (_parse_str, _REQUIRED),
    "seed": (_parse_int, 42),
    "parallel": (_parse_int, 0),
    "out": (_parse_str, ""),
}

KINDS = tuple(_SCHEMA)


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    parallel: int
    out: str
    values: dict[str, dict[str, object]]
    config_hash: str

    def get(self, section: str, key: str):
        return self.values[section][key]


def _canonical_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, tuple):
        return ",".join(_canonical_value(e) for e in v)
    return str(v)


def _finalize(kind: str, seed: int, parallel: int, out: str,
              values: dict[str, dict[str, object]]) -> ExperimentConfig:
    lines = [f"experiment.kind={kind}", f"experiment.seed={seed}"]
    for sec in sorted(values):
        for key in sorted(values[sec]):
            lines.append(f"{sec}.{key}={_canonical_value(values[sec][key])}")
    digest = hashlib.sha256("\n".join(lines).encode("ascii")).hexdigest()
    return ExperimentConfig(kind, seed, parallel, out, values, digest)


def default_config(kind: str, seed: int = 42, parallel: int = 0, out: str = "") -> ExperimentConfig:
    """Build a config from schema defaults alone (no file)."""
    if kind not in _SCHEMA:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {KINDS}")
    values: dict[str, dict[str, object]] = {}
    for sec, keys in _SCHEMA[kind].items():
        values[sec] = {}
        for key, (_, default) in keys.items():
            if default is _REQUIRED:
                raise ConfigError(f"kind {kind!r} requires a config file ({sec}.{key} has no default)")
            values[sec][key] = default
    return _finalize(kind, seed, parallel, out, values)


def export_config(checkpoint: str, threshold: float = 0.0, seed: int = 42,
                  parallel: int = 0, out: str = "") -> ExperimentConfig:
    """Config for the export command built straight from arguments."""
    values = {"export": {"checkpoint": checkpoint, "threshold": float(threshold)}}
    return _finalize("export", seed, parallel, out, values)


def load_config(path, expected_kind: str | None = None,
                seed_override: int | None = None,
                parallel_override: int | None = None,
                out_override: str | None = None) -> ExperimentConfig:
    """Parse and validate a config file, applying command-line overrides."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive; unknown case is unknown key
    try:
        read = cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")

    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    exp: dict[str, object] = {}
    for key, raw in cp["experiment"].items():
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"unknown key experiment.{key}")
        parser, _ = _EXPERIMENT_KEYS[key]
        try:
            exp[key] = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for experiment.{key}: {exc}") from exc
    for key, (_, default) in _EXPERIMENT_KEYS.items():
        if key not in exp:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key experiment.{key}")
            exp[key] = default

    kind = str(exp["kind"])
    if kind not in _SCHEMA:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {KINDS}")
    if expected_kind is not None and kind != expected_kind:
        raise ConfigError(
            f"config is for kind {kind!r} but the {expected_kind!r} command was invoked"
        )

    schema = _SCHEMA[kind]
    values: dict[str, dict[str, object]] = {}
    for sec in cp.sections():
        if sec == "experiment":
            continue
        if sec not in schema:
            raise ConfigError(f"unknown section [{sec}] for kind {kind!r}")
        values[sec] = {}
        for key, raw in cp[sec].items():
            if key not in schema[sec]:
                raise ConfigError(f"unknown key {sec}.{key}")
            parser, _ = schema[sec][key]
            try:
                values[sec][key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {sec}.{key}: {exc}") from exc
    for sec, keys in schema.items():
        values.setdefault(sec, {})
        for key, (_, default) in keys.items():
            if key not in values[sec]:
                if default is _REQUIRED:
                    raise ConfigError(f"missing required key {sec}.{key}")
                values[sec][key] = default

    seed = int(exp["seed"]) if seed_override is None else seed_override
    parallel = int(exp["parallel"]) if parallel_override is None else parallel_override
    out = str(exp["out"]) if out_override is None else out_override
    return _finalize(kind, seed, parallel, out, values)
