"""Experiment configuration: INI files with an ``[experiment]`` section, optional
``[params]`` and ``[grid]`` sections, and command-line overrides.

Example::

    [experiment]
    command = complexity-bound
    group = su
    seed = 7
    samples = 1000
    output_dir = out

    [params]
    r = 1
    gate_set_size = 2

    [grid]
    qubits = 6, 8, 10
    delta = 0.1, 0.5

The grid is the Cartesian product of the listed values; a grid key with no
values yields zero points.
"""
from __future__ import annotations

import configparser
import itertools
from dataclasses import asdict, dataclass, field
from typing import Any

from .errors import ConfigError
from .groups import normalize_kind

COMMANDS = ("sample", "moment", "twirl-check", "concentration", "tv-distance",
            "complexity-bound", "packing", "sq-bound")

# parameter name -> parser; anything else in [params] or [grid] is rejected
PARAM_TYPES: dict[str, type] = {
    "qubits": int, "dim": int, "k": int, "r": int, "gate_set_size": int, "delta": float,
    "Delta": float, "design_epsilon": float, "tau": float, "epsilon": float, "beta": float,
    "polys": int, "inputs": int, "method": str, "mode": str, "simplified": bool,
    "integer_m": bool, "corollary": bool, "invariance": bool, "taus": str, "workers": int,
    "n_states": int,
}

TOLERANCE_KEYS = ("z_max", "idempotence", "pvalue_min", "n_se")
DEFAULT_TOLERANCES = {"z_max": 5.0, "idempotence": 1e-10, "pvalue_min": 1e-4, "n_se": 3.0}


@dataclass
class ExperimentConfig:
    command: str
    group: str = "SU"
    seed: int = 0
    n_samples: int = 10_000
    output_dir: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    grid: dict[str, list] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}",
                              "experiment.command")
        try:
            self.group = normalize_kind(self.group)
        except ValueError as exc:
            raise ConfigError(str(exc), "experiment.group") from None
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer", "experiment.seed")
        if self.n_samples < 0:
            raise ConfigError("samples must be nonnegative", "experiment.samples")
        for key in self.params:
            _check_param_key(key, "params")
        for key in self.grid:
            _check_param_key(key, "grid")
        for key in self.tolerances:
            if key not in TOLERANCE_KEYS:
                raise ConfigError(f"unknown tolerance {key!r}", f"tolerances.{key}")

    def points(self) -> list[dict]:
        """Parameter dicts, one per grid point (a single point when there is no grid)."""
        if not self.grid:
            return [dict(self.params)]
        keys = list(self.grid)
        return [{**self.params, **dict(zip(keys, combo))}
                for combo in itertools.product(*(self.grid[k] for k in keys))]

    def to_dict(self) -> dict:
        return asdict(self)


def _check_param_key(key: str, section: str) -> None:
    if key not in PARAM_TYPES:
        raise ConfigError(f"unknown parameter {key!r}", f"{section}.{key}")


def parse_value(key: str, raw: str, path: str):
    kind = PARAM_TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown parameter {key!r}", path)
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("1", "true", "yes", "on")
        if kind is int:
            return int(raw, 0)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {kind.__name__}", path) from None


def load_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep "Delta" distinct from "delta"
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from None
    return config_from_parser(cp)


def config_from_string(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_parser(cp)


def config_from_parser(cp: configparser.ConfigParser) -> ExperimentConfig:
    allowed = {"experiment", "params", "grid", "tolerances"}
    for section in cp.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}]", section)
    if not cp.has_section("experiment"):
        raise ConfigError("missing [experiment] section", "experiment")
    exp = cp["experiment"]
    known = {"command", "group", "seed", "samples", "output_dir"}
    for key in exp:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", f"experiment.{key}")
    if "command" not in exp:
        raise ConfigError("missing command", "experiment.command")

    def as_int(key, default):
        if key not in exp:
            return default
        try:
            return int(exp[key], 0)
        except ValueError:
            raise ConfigError(f"cannot parse {exp[key]!r} as int", f"experiment.{key}") from None

    params = {k: parse_value(k, v, f"params.{k}") for k, v in cp["params"].items()} \
        if cp.has_section("params") else {}
    grid = {}
    if cp.has_section("grid"):
        for k, v in cp["grid"].items():
            items = [s for s in v.split(",") if s.strip()]
            grid[k] = [parse_value(k, s, f"grid.{k}") for s in items]
    tolerances = dict(DEFAULT_TOLERANCES)
    if cp.has_section("tolerances"):
        for k, v in cp["tolerances"].items():
            if k not in TOLERANCE_KEYS:
                raise ConfigError(f"unknown tolerance {k!r}", f"tolerances.{k}")
            try:
                tolerances[k] = float(v)
            except ValueError:
                raise ConfigError(f"cannot parse {v!r} as float", f"tolerances.{k}") from None
    return ExperimentConfig(
        command=exp["command"].strip(),
        group=exp.get("group", "su"),
        seed=as_int("seed", 0),
        n_samples=as_int("samples", 10_000),
        output_dir=exp.get("output_dir"),
        params=params,
        grid=grid,
        tolerances=tolerances,
    )
