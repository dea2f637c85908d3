"""Experiment configuration: JSON file + key=value overrides + env seed.

A config names one experiment and supplies only the parameters that
experiment consumes; unknown keys are rejected so a typo cannot silently
fall back to a default.  Pass/fail tolerances live in their own `tolerances`
map and are likewise validated against the experiment's declared set.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Callable

SEED_ENV_VAR = "SACCEL_SEED"
DEFAULT_MASTER_SEED = 20260301


class ConfigError(ValueError):
    """Invalid configuration; maps to CLI exit status 2."""


@dataclass(frozen=True)
class ParamSpec:
    default: Any
    validate: Callable[[Any], Any] | None = None
    help: str = ""


def positive_int(name):
    def check(v):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        return v

    return check


def positive_float(name):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"{name} must be a positive number, got {v!r}")
        return float(v)

    return check


def nonnegative_float(name):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0:
            raise ConfigError(f"{name} must be a nonnegative number, got {v!r}")
        return float(v)

    return check


def float_list(name):
    def check(v):
        if not isinstance(v, (list, tuple)) or not v:
            raise ConfigError(f"{name} must be a non-empty list of numbers")
        out = []
        for item in v:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{name} entries must be numbers, got {item!r}")
            out.append(float(item))
        return out

    return check


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    master_seed: int
    params: dict
    tolerances: dict
    output_dir: str | None = None

    def echo(self) -> dict:
        # Canonical form written into the run manifest.
        return {
            "experiment": self.experiment,
            "master_seed": self.master_seed,
            "params": dict(sorted(self.params.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
            "output_dir": self.output_dir,
        }


@dataclass(frozen=True)
class ExperimentDef:
    """Registry entry: what the experiment verifies and what it consumes."""

    name: str
    claim: str
    params: dict = field(default_factory=dict)  # name -> ParamSpec
    tolerances: dict = field(default_factory=dict)  # name -> default
    exploratory: bool = False


def parse_set_override(text: str) -> tuple:
    """Parse one `--set key=value`; values are JSON, falling back to strings."""
    if "=" not in text:
        raise ConfigError(f"--set needs key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"--set needs a nonempty key, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def build_config(
    definition: ExperimentDef,
    file_values: dict,
    overrides: list | None = None,
    env: dict | None = None,
) -> ExperimentConfig:
    """Merge defaults, config-file values, --set overrides, and the env seed."""
    env = os.environ if env is None else env
    values = dict(file_values)
    for text in overrides or []:
        key, val = parse_set_override(text)
        if key.startswith("tolerances."):
            values.setdefault("tolerances", {})
            if not isinstance(values["tolerances"], dict):
                raise ConfigError("tolerances must be a map")
            values["tolerances"] = dict(values["tolerances"])
            values["tolerances"][key.split(".", 1)[1]] = val
        else:
            values[key] = val

    experiment = values.pop("experiment", definition.name)
    if experiment != definition.name:
        raise ConfigError(
            f"config names experiment {experiment!r} but {definition.name!r} was requested"
        )
    master_seed = values.pop("master_seed", DEFAULT_MASTER_SEED)
    output_dir = values.pop("output_dir", None)
    tol_in = values.pop("tolerances", {})
    if not isinstance(tol_in, dict):
        raise ConfigError("tolerances must be a map of name -> number")

    if SEED_ENV_VAR in env:
        try:
            master_seed = int(env[SEED_ENV_VAR])
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer") from None
    if isinstance(master_seed, bool) or not isinstance(master_seed, int):
        raise ConfigError(f"master_seed must be an integer, got {master_seed!r}")

    unknown = set(values) - set(definition.params)
    if unknown:
        raise ConfigError(
            f"unknown parameters for {definition.name}: {sorted(unknown)}; "
            f"accepted: {sorted(definition.params)}"
        )
    params = {}
    for name, spec in definition.params.items():
        value = values.get(name, spec.default)
        if spec.validate is not None:
            value = spec.validate(value)
        params[name] = value

    unknown_tol = set(tol_in) - set(definition.tolerances)
    if unknown_tol:
        raise ConfigError(
            f"unknown tolerances for {definition.name}: {sorted(unknown_tol)}; "
            f"accepted: {sorted(definition.tolerances)}"
        )
    tolerances = dict(definition.tolerances)
    for name, value in tol_in.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"tolerance {name} must be a number, got {value!r}")
        tolerances[name] = float(value)

    return ExperimentConfig(
        experiment=definition.name,
        master_seed=master_seed,
        params=params,
        tolerances=tolerances,
        output_dir=output_dir,
    )


def load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    if "experiment" not in data:
        raise ConfigError("config file must name an 'experiment'")
    return data
