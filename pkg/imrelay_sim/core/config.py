import logging
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import yaml

from .errors import OutputError, ValidationError
from .lib import env
from .lib.parsing import parse_choices, parse_float, parse_float_list, parse_grid, parse_int, parse_int_list
from .models import SWEEP_FIELDS, SweepConfig
from .types import POLICY_KINDS, Mode, Strategy

logger = logging.getLogger(__name__)

CONFIG_NAME = "config.yaml"

PRESETS: dict[str, dict[str, Any]] = {
    "desk": {
        "n_t": 16,
        "n_s_list": [2, 4, 8],
        "snr_points_db": "0:5:40",
        "trials": 10_000,
        "pattern_policy": "exact",
    },
    "paper": {
        "n_t": 128,
        "n_s_list": [2, 4, 8],
        "snr_points_db": "0:5:40",
        "trials": 2_000,
        "pattern_policy": "sampled",
        "pattern_draws": 256,
    },
}

_INT_FIELDS = {"n_t", "trials", "master_seed", "pattern_draws", "enumeration_cap"}
_FLOAT_FIELDS = {"mu_1", "mu_2", "n_0"}
_MODES = frozenset(str(m) for m in Mode)
_STRATEGIES = frozenset(str(s) for s in Strategy)


class Config:
    """Single-instance user config (~/.imrelay/config.yaml). Load once, cache in memory."""

    _instance: "Config | None" = None
    _data: dict[str, object]

    def __new__(cls) -> "Config":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._data = {}
            cls._instance._load()
        return cls._instance

    def _load(self) -> None:
        path = env.config_dir() / CONFIG_NAME
        if not path.exists():
            self._data = {}
            return
        try:
            self._data = read_mapping(path)
        except ValidationError as e:
            logger.warning("ignoring user config %s: %s", path, e)
            self._data = {}

    def get(self, key: str, default: object = None) -> object:
        return self._data.get(key, default)

    def sweep_defaults(self) -> dict[str, object]:
        """User-level overrides of sweep fields; other keys (e.g. workers) are not sweep fields."""
        return {k: v for k, v in self._data.items() if k in SWEEP_FIELDS}


def reset_user_config() -> None:
    Config._instance = None


def read_mapping(path: Path) -> dict[str, object]:
    try:
        with path.open() as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise OutputError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ValidationError(f"config {path} is not valid YAML: {e}", field="config") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationError(f"config {path} must be a flat key/value mapping", field="config")
    return {str(k): v for k, v in data.items()}


def _as_text(value: object) -> str:
    if isinstance(value, list | tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def coerce(name: str, value: object) -> object:
    """Turn a YAML, env or flag value into the type SweepConfig expects for `name`."""
    if name not in SWEEP_FIELDS:
        raise ValidationError(f"unknown config key '{name}'. valid: {', '.join(SWEEP_FIELDS)}", field=name)
    if isinstance(value, bool):
        raise ValidationError(f"{name}: booleans are not accepted", field=name)
    if name in _INT_FIELDS:
        if isinstance(value, int):
            return value
        return parse_int(_as_text(value), name)
    if name in _FLOAT_FIELDS:
        if isinstance(value, int | float):
            return float(value)
        return parse_float(_as_text(value), name)
    if name == "n_s_list":
        return tuple(parse_int_list(_as_text(value), name))
    if name == "snr_points_db":
        if isinstance(value, list | tuple):
            return tuple(parse_float_list(_as_text(value), name))
        return tuple(parse_grid(_as_text(value), name))
    if name == "modes":
        return tuple(Mode(v) for v in parse_choices(_as_text(value), name, _MODES))
    if name == "strategies":
        return tuple(Strategy(v) for v in parse_choices(_as_text(value), name, _STRATEGIES))
    if name == "pattern_policy":
        return parse_choices(_as_text(value), name, POLICY_KINDS)[0]
    raise AssertionError(f"unhandled sweep field {name}")


def build_sweep_config(layers: Sequence[Mapping[str, object]], preset: str | None = None) -> SweepConfig:
    """Merge config layers over the defaults (or a preset); later layers win."""
    merged: dict[str, object] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ValidationError(f"unknown preset '{preset}'. valid: {', '.join(PRESETS)}", field="preset")
        merged.update({k: coerce(k, v) for k, v in PRESETS[preset].items()})
    for layer in layers:
        merged.update({k: coerce(k, v) for k, v in layer.items()})
    try:
        return SweepConfig(**merged)  # type: ignore[arg-type]
    except TypeError as e:
        raise ValidationError(str(e), field="config") from e


def load_sweep_config(
    path: Path | None = None,
    overrides: Mapping[str, object] | None = None,
    preset: str | None = None,
) -> SweepConfig:
    layers: list[Mapping[str, object]] = [Config().sweep_defaults()]
    if path is not None:
        if not path.exists():
            raise OutputError(f"config file not found: {path}")
        layers.append(read_mapping(path))
    if overrides:
        layers.append(overrides)
    return build_sweep_config(layers, preset=preset)
