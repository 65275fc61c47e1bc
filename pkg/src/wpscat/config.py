"""Experiment configuration files (JSON) and their validation.

A config is one JSON object:

    {
      "experiment": "classify",
      "grid":      {"dim": 1, "half_width": 256, "points": 2048, "x_stride": 2},
      "potential": {"family": "poschl_teller", "lam": 1.0, "C": null},
      "window":    {"kind": "gaussian_scat", "width": 1.0},
      "region":    {"variant": "GammaAR", "a": 0.5, "R": 10},
      "state":     {"kind": "bound_state"},
      "schedule":  {"dt": 0.01, "tau": 0.0, "T": 50},
      "thresholds": {"decay_ratio": 0.05},
      "output_dir": "out/classify",
      "seed": 0
    }

Unknown keys anywhere are rejected with ConfigInvalid naming the dotted key.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigInvalid

EXPERIMENTS = ("diagnostic", "cook", "inverse_cook", "classify", "lemma32", "lemma33", "kuroda",
               "duhamel", "bound_state")

_SECTION_KEYS = {
    "grid": {"dim", "half_width", "points", "x_stride"},
    "potential": {"family", "C", "delta", "strength", "lam", "omega", "core"},
    "window": {"kind", "width", "center", "momentum", "low", "high", "sharpness"},
    "region": {"variant", "a", "R", "b", "sign", "N", "sigma", "d", "r"},
    "state": {"kind", "width", "center", "momentum", "low", "high", "sharpness", "horizons", "sign",
              "potential"},
    "schedule": {"dt", "t_tolerance", "tau", "times", "horizons", "sign", "T", "samples", "s_list",
                 "t_list", "t0", "t", "quad_steps", "power_iterations", "fit_window", "l", "K_lo",
                 "K_hi", "margin", "probe_width", "stability_check", "b_values", "domination_tol"},
    "thresholds": {"decay_ratio", "plateau_ratio", "cauchy_tol", "stability_shift"},
    "expect": {"verdict", "fit_exponent", "converged", "error", "max_value", "min_value", "ratio_max",
               "energy", "dominated", "fit_exponents"},
}

_REQUIRED = {
    "diagnostic": ("grid", "potential", "window", "region", "state", "schedule"),
    "cook": ("grid", "potential", "state", "schedule"),
    "inverse_cook": ("grid", "potential", "state", "schedule"),
    "classify": ("grid", "potential", "window", "region", "state", "schedule"),
    "lemma32": ("grid", "potential", "window", "region", "schedule"),
    "lemma33": ("grid", "potential", "window", "region", "schedule"),
    "kuroda": ("grid", "state", "schedule"),
    "duhamel": ("grid", "potential", "window", "state", "schedule"),
    "bound_state": ("grid", "potential"),
}


@dataclass
class ExperimentConfig:
    experiment: str
    grid: dict
    potential: dict = field(default_factory=lambda: {"family": "zero"})
    window: dict = field(default_factory=dict)
    region: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    output_dir: str = "out"
    seed: int = 0
    expect: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    for key in raw:
        if key not in known:
            raise ConfigInvalid(f"unknown key {key!r}")
    if "experiment" not in raw:
        raise ConfigInvalid("missing key 'experiment'")
    kind = raw["experiment"]
    if kind not in EXPERIMENTS:
        raise ConfigInvalid(f"key 'experiment': unknown kind {kind!r}")
    for section, allowed in _SECTION_KEYS.items():
        value = raw.get(section, {})
        if value is None:
            value = {}
        if not isinstance(value, dict):
            raise ConfigInvalid(f"key {section!r} must be an object")
        for key in value:
            if key not in allowed:
                raise ConfigInvalid(f"unknown key '{section}.{key}'")
    for section in _REQUIRED[kind]:
        if not raw.get(section):
            raise ConfigInvalid(f"missing key {section!r} for experiment {kind!r}")
    for key in ("dim", "half_width", "points"):
        if key not in raw["grid"]:
            raise ConfigInvalid(f"missing key 'grid.{key}'")
    if not isinstance(raw.get("seed", 0), int):
        raise ConfigInvalid("key 'seed' must be an integer")
    return ExperimentConfig(**{k: v for k, v in raw.items() if v is not None})


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)
