"""Run configuration: JSON text validated against the shipped schema, defaults filled in."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .dynamics import PhysParams, StepperConfig
from .spectral_core import DomainSpec, Resolution

# documented in README; every key is overridable with --override section.key=value
DEFAULTS = {
    "domain": {"l": 1.0},
    "resolution": {"Nx": 8, "My": 8, "Jy": None, "quad_x": None, "quad_y": None},
    "stepper": {"dt": 1e-3, "scheme": "cnab2", "t_end": 1.0, "ledger_stride": 1, "cfl": 0.5},
    "initial": {"preset": "smallRa", "checkpoint": None, "energy": 1.0},
    "monitors": {"tol": 1e-6, "dt_slack": 1.0, "C1": None, "C2": None},
    "constants": {"names": ["k1", "k2", "k3", "k4", "k5", "k6", "k7"], "trials": 100, "Nx": 4, "My": 4},
    "depend": {"deltas": [1e-6, 5e-7]},
    "converge": {"resolutions": [8, 16, 32]},
    "output": {"dir": "runs/out"},
    "seed": 0,
    "experiment": "simulate",
}

DEFAULT_PARAMS = {"Pr": 1.0, "Ra": 1.0, "Nsq": 0.5, "Lsq": 1.0, "D": 1.0}


class ConfigError(ValueError):
    pass


def schema() -> dict:
    text = resources.files("micropolar").joinpath("data/config.schema.json").read_text()
    return json.loads(text)


@dataclass
class RunConfig:
    domain: DomainSpec
    resolution: Resolution
    params: PhysParams
    stepper: StepperConfig
    initial: dict
    monitors: dict
    constants: dict
    depend: dict
    converge: dict
    out_dir: Path
    seed: int
    experiment: str
    raw: dict = field(repr=False, default_factory=dict)

    def echo(self) -> dict:
        """Fully resolved config as plain JSON data."""
        return copy.deepcopy(self.raw)


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _validate(data: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = ".".join(str(p) for p in e.absolute_path) or "<root>"
        if e.validator == "required":
            missing = e.message.split("'")[1]
            path = f"{path}.{missing}" if path != "<root>" else missing
        raise ConfigError(f"config field {path}: {e.message}")


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``section.key=value`` overrides; only scalar leaves may be replaced."""
    data = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r}: {p!r} is not a section")
        leaf = parts[-1]
        if isinstance(node.get(leaf), (dict, list)):
            raise ConfigError(f"override {key!r} targets a non-scalar field")
        value = parse_value(text)
        if isinstance(value, (dict, list)):
            raise ConfigError(f"override {key!r} must be a scalar")
        node[leaf] = value
    return data


def build_config(data: dict) -> RunConfig:
    _validate(data)
    full = _merge(DEFAULTS, data)
    _validate(full)
    try:
        params = PhysParams(l=full["domain"]["l"], **full["params"])
        domain = DomainSpec(full["domain"]["l"])
        resolution = Resolution(**full["resolution"])
        stepper = StepperConfig(**full["stepper"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        domain=domain,
        resolution=resolution,
        params=params,
        stepper=stepper,
        initial=full["initial"],
        monitors=full["monitors"],
        constants=full["constants"],
        depend=full["depend"],
        converge=full["converge"],
        out_dir=Path(full["output"]["dir"]),
        seed=full["seed"],
        experiment=full["experiment"],
        raw=full,
    )


def parse_config(text: str, overrides=None) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return build_config(apply_overrides(data, overrides))


def load_config(path=None, overrides=None) -> RunConfig:
    """Read ``path`` (or the built-in small-Ra defaults when ``None``)."""
    if path is None:
        text = json.dumps({"params": DEFAULT_PARAMS})
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)
