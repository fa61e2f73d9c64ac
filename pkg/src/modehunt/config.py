"""Pipeline configuration: a flat INI file with strict validation.

Unknown sections or keys are rejected outright, every value is
range-checked at load time, and the effective configuration (defaults
included) is echoed into each run report so results are auditable.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields

from .bwselect import INDEX_FUNCTIONS


class ConfigError(Exception):
    """Invalid, unknown, or out-of-range configuration input."""


def _positive_int(minimum):
    def parse(raw, where):
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{where}: expected an integer, got {raw!r}") from None
        if value < minimum:
            raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
        return value

    return parse


def _unit_open(raw, where):
    value = _real(raw, where)
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{where}: must lie strictly between 0 and 1, got {value}")
    return value


def _real(raw, where):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {raw!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ConfigError(f"{where}: must be finite, got {raw!r}")
    return value


def _positive_real(raw, where):
    value = _real(raw, where)
    if value <= 0:
        raise ConfigError(f"{where}: must be positive, got {value}")
    return value


def _string(raw, where):
    if not raw:
        raise ConfigError(f"{where}: empty value")
    return raw


def _index_choice(raw, where):
    if raw not in INDEX_FUNCTIONS:
        raise ConfigError(f"{where}: unknown index {raw!r}; choose from {sorted(INDEX_FUNCTIONS)}")
    return raw


def _int_list(raw, where):
    try:
        values = [int(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated integers, got {raw!r}") from None
    if not values:
        raise ConfigError(f"{where}: empty list")
    if len(set(values)) != len(values):
        raise ConfigError(f"{where}: duplicate entries in {raw!r}")
    if min(values) < 0:
        raise ConfigError(f"{where}: indices are 0-based and nonnegative, got {min(values)}")
    return values


def _real_list(raw, where):
    try:
        values = [float(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated numbers, got {raw!r}") from None
    if not values:
        raise ConfigError(f"{where}: empty list")
    return values


@dataclass
class PipelineConfig:
    """Every tunable of the pipeline, with documented defaults."""

    # [data]
    background: str | None = None
    experimental: str | None = None
    test: str | None = None
    label_column: str | None = None
    test_fraction: float = 0.5

    # [varselect]
    iterations: int = 1000
    subset_size: int = 3
    threshold: float = 0.01
    permutations: int = 199
    variables: list | None = None  # fixed 0-based list; skips selection

    # [bandwidth]
    h_b: float | None = None  # default: plug-in on the background
    grid_points: int = 30
    grid_lo: float = 0.2
    grid_hi: float = 3.0
    index: str = "fowlkes_mallows"

    # [modetest]
    alpha: float = 0.001
    replicates: int = 1000
    h_test: float | None = None  # default: the selected bandwidth

    # [run]
    seed: int = 0
    out: str = "out"

    # [synth]
    n_background: int = 2000
    n_experimental: int = 2000
    dimension: int = 2
    signal_fraction: float = 0.3
    signal_mean: list = field(default_factory=lambda: [4.0, 4.0])
    signal_sd: float = 0.5

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


_SCHEMA = {
    "data": {
        "background": ("background", _string),
        "experimental": ("experimental", _string),
        "test": ("test", _string),
        "label_column": ("label_column", _string),
        "test_fraction": ("test_fraction", _unit_open),
    },
    "varselect": {
        "iterations": ("iterations", _positive_int(1)),
        "subset_size": ("subset_size", _positive_int(1)),
        "threshold": ("threshold", _unit_open),
        "permutations": ("permutations", _positive_int(99)),
        "variables": ("variables", _int_list),
    },
    "bandwidth": {
        "h_b": ("h_b", _positive_real),
        "grid_points": ("grid_points", _positive_int(2)),
        "grid_lo": ("grid_lo", _positive_real),
        "grid_hi": ("grid_hi", _positive_real),
        "index": ("index", _index_choice),
    },
    "modetest": {
        "alpha": ("alpha", _unit_open),
        "replicates": ("replicates", _positive_int(200)),
        "h": ("h_test", _positive_real),
    },
    "run": {
        "seed": ("seed", _positive_int(0)),
        "out": ("out", _string),
    },
    "synth": {
        "n_background": ("n_background", _positive_int(2)),
        "n_experimental": ("n_experimental", _positive_int(2)),
        "dimension": ("dimension", _positive_int(1)),
        "signal_fraction": ("signal_fraction", _real),
        "signal_mean": ("signal_mean", _real_list),
        "signal_sd": ("signal_sd", _positive_real),
    },
}


def load_config(path):
    """Parse and validate an INI config file into a PipelineConfig."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None

    cfg = PipelineConfig()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]; known: {sorted(_SCHEMA)}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"{path}: unknown key {key!r} in [{section}]; "
                    f"known: {sorted(_SCHEMA[section])}"
                )
            attr, parse = _SCHEMA[section][key]
            setattr(cfg, attr, parse(raw.strip(), f"{path} [{section}] {key}"))
    _cross_validate(cfg, path)
    return cfg


def _cross_validate(cfg, path):
    if cfg.grid_lo >= cfg.grid_hi:
        raise ConfigError(f"{path}: grid_lo must be below grid_hi")
    if not 0.0 <= cfg.signal_fraction < 1.0:
        raise ConfigError(f"{path}: signal_fraction must lie in [0, 1)")
    if len(cfg.signal_mean) != cfg.dimension:
        raise ConfigError(
            f"{path}: signal_mean has {len(cfg.signal_mean)} entries "
            f"for dimension {cfg.dimension}"
        )
