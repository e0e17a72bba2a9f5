"""Environment registry: identifier strings of the form
``"<motor>-<cont|disc>-v0"`` mapped onto preset configurations."""

from __future__ import annotations

import re

from .config import config_from_dict, merge_overrides
from .envs import MotorEnv
from .errors import ConfigError
from .motors import MOTOR_KINDS
from .presets import preset_dict

_ID_RE = re.compile(r"^(?P<motor>[a-z]+)-(?P<mode>cont|disc)-v0$")
_MODES = {"cont": "continuous", "disc": "discrete"}


def env_ids() -> tuple:
    """All registered environment identifiers."""
    return tuple(f"{m}-{s}-v0" for m in MOTOR_KINDS for s in ("cont", "disc"))


def default_config_dict(env_id: str) -> dict:
    """Preset configuration dictionary behind an identifier."""
    m = _ID_RE.match(env_id)
    if not m or m["motor"] not in MOTOR_KINDS:
        raise ConfigError(
            f"unknown environment id {env_id!r}; expected one of {env_ids()}")
    return preset_dict(m["motor"], _MODES[m["mode"]])


def make(env_id: str, overrides: dict | None = None) -> MotorEnv:
    """Construct an environment from its identifier, deep-merging optional
    configuration overrides (file schema keys) into the preset."""
    cfg = default_config_dict(env_id)
    if overrides:
        cfg = merge_overrides(cfg, dict(overrides))
    return MotorEnv(config_from_dict(cfg))
