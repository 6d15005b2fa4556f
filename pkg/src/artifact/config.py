"""Scenario configuration: defaults, JSON file, ``ARTIFACT_*`` environment overrides, schema check."""

from __future__ import annotations

import copy
import json
import os
from importlib import resources

import jsonschema

from .liealg import ValidationError

SCENARIOS = (
    "oscillator-demo",
    "normalform-check",
    "ymh-evolve",
    "ymh-classify",
    "gauss-solve",
    "howe-table",
    "hodge-selftest",
)

DEFAULTS = {
    "lattice": {"dims": [4, 4, 4], "h": 1.0},
    "physics": {"g": 0.65, "gp": 0.35, "lambda_h": 0.13, "nu_h": 1.0, "lapse": 1.0},
    "run": {"dt": 1e-3, "steps": 1000, "every": 10, "seed": 0, "preset": "generic", "acceptance": False},
    "tolerances": {
        "energy": 1e-2,
        "noether": 1e-9,
        "charge": 1e-9,
        "picard": 1e-9,
        "stab": 1e-10,
        "stratum": 1e-8,
        "constraint": 1e-8,
    },
    "oscillator": {"hbar0": 1.0, "t0": 0.0},
    "tables": {"pmax": 6},
}

# per-scenario adjustments of the run block
SCENARIO_RUN = {
    "oscillator-demo": {"dt": 0.01, "steps": 1000},
    "ymh-classify": {"preset": "seam"},
}

ENV_PREFIX = "ARTIFACT_"


def schema() -> dict:
    return json.loads(resources.files("artifact").joinpath("data", "config.schema.json").read_text())


def _merge(base: dict, upd: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in upd.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _parse_env_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        if "," in raw:
            return [_parse_env_value(x) for x in raw.split(",")]
        return raw


def env_overrides(environ=None) -> dict:
    """``ARTIFACT_<BLOCK>_<KEY>=value`` becomes ``{block: {key: value}}``; ``ARTIFACT_SCENARIO`` sets the scenario."""
    environ = os.environ if environ is None else environ
    out: dict = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX) :].lower()
        if key == "scenario":
            out["scenario"] = raw
            continue
        block, _, field = key.partition("_")
        if block in DEFAULTS and field:
            out.setdefault(block, {})[field] = _parse_env_value(raw)
    return out


def validate(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"invalid config at {path}: {exc.message}") from None
    return cfg


def load_config(scenario: str | None = None, path=None, seed: int | None = None, environ=None) -> dict:
    """Merge defaults, the config file, environment overrides and the seed flag, then validate."""
    user: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        if not isinstance(user, dict):
            raise ValidationError("config must be a JSON object")
    env = env_overrides(environ)
    name = scenario or env.get("scenario") or user.get("scenario")
    if name is None:
        raise ValidationError("no scenario given")
    cfg = _merge(DEFAULTS, {"run": SCENARIO_RUN.get(name, {})})
    cfg = _merge(cfg, user)
    cfg = _merge(cfg, env)
    cfg["scenario"] = name
    if seed is not None:
        cfg["run"]["seed"] = seed
    return validate(cfg)
