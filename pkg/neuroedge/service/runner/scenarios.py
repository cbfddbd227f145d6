import copy
import json
import logging
from pathlib import Path

import pydantic

from neuroedge.domain.errors import ParseError, ValidationError
from neuroedge.models.scenario import ScenarioConfig


logger = logging.getLogger(__name__)


def _identity(n: int, scale: float = 1.0) -> list[list[float]]:
    return [[scale if i == j else 0.0 for j in range(n)] for i in range(n)]


WORKBENCH = {
    "scenario": "workbench",
    "horizon": 10.0,
    "dt": 0.1,
    "x0": [5.0, 2.0],
    "Q": _identity(2),
    "R": [[1.0]],
    "network": {
        "N": 30,
        "P": 50,
        # unit variance keeps the readout step well below the post-warmup command
        "decoder_variance": 1.0,
        "lambda": 1e-3,
        "mu": 1e-3,
        "nu": 1e-3,
        "k_fb": 500.0,
        "eta": 1e-3,
    },
    # 100 substeps keep k_fb * dt_sub at 0.5
    "learning": {
        "e_th": [0.1],
        "warmup_steps": 50,
        "check_interval": 50,
        "substeps_per_step": 100,
        "max_spikes_per_substep": 1,
        "command": "state",
        "fit_window": 50,
    },
    "obstacles": [],
}

RENDEZVOUS = {
    "scenario": "rendezvous",
    "horizon": 360.0,
    "dt": 0.1,
    "x0": [70.0, 30.0, -5.0, -1.7, -0.9, 0.25],
    "Q": _identity(6, 1e-6),
    "R": _identity(3),
    "orbit": {"mu_earth": 398600.0, "R0": 6771.0},
    "network": {
        "N": 50,
        "P": 50,
        "decoder_variance": 1e-3,
        "lambda": 1e-4,
        "mu": 1e-4,
        "nu": 1e-4,
        "k_fb": 250.0,
        "eta": 1e-3,
    },
    "learning": {
        "e_th": [1e-4, 1e-4, 1e-4],
        "warmup_steps": 50,
        "check_interval": 50,
        "substeps_per_step": 50,
        "max_spikes_per_substep": 1,
        "command": "state",
        "fit_window": 50,
    },
    "obstacles": [],
    "repulsion": {"k_rep": 10.0, "d0": 10.0},
}

STATIC_OBSTACLE = {"center0": [26.0, 9.0, 1.5], "velocity": [0.0, 0.0, 0.0], "radius": 2.0}
# crosses the approach path around t=22 s; larger than the static one so the encounter lasts longer
DYNAMIC_OBSTACLE = {"center0": [35.0, 6.0, -0.5], "velocity": [0.0, 0.3, 0.0], "radius": 3.0}


def scenario_defaults(kind: str) -> dict:
    if not isinstance(kind, str):
        raise ValidationError([f"scenario: expected a name, got {kind!r}"])
    if kind == "workbench":
        return copy.deepcopy(WORKBENCH)
    if kind.startswith("rendezvous"):
        defaults = copy.deepcopy(RENDEZVOUS)
        defaults["scenario"] = kind
        if kind == "rendezvous_static_obstacle":
            defaults["obstacles"] = [copy.deepcopy(STATIC_OBSTACLE)]
        elif kind == "rendezvous_dynamic_obstacle":
            defaults["obstacles"] = [copy.deepcopy(DYNAMIC_OBSTACLE)]
        elif kind != "rendezvous":
            raise ValidationError([f"scenario: unknown kind '{kind}'"])
        return defaults
    raise ValidationError([f"scenario: unknown kind '{kind}'"])


def deep_merge(base: dict, overrides: dict) -> dict:
    """Merge nested dicts; lists and scalars in `overrides` replace those in `base`."""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def config_from_dict(data: dict) -> ScenarioConfig:
    """Fill `data` with the defaults of its scenario and validate it."""
    if not isinstance(data, dict):
        raise ValidationError(["configuration must be a JSON object"])
    merged = deep_merge(scenario_defaults(data.get("scenario", "workbench")), data)
    try:
        return ScenarioConfig.model_validate(merged)
    except pydantic.ValidationError as e:
        violations = [f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()]
        raise ValidationError(violations) from e


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read configuration {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {path}: {e.msg}", e.lineno, e.colno) from e

    cfg = config_from_dict(data)
    logger.info(f"loaded {cfg.scenario} scenario from {path}")
    return cfg
