"""Configuration files: strict JSON key/value covering every environment
setting.  Unknown keys are rejected with the offending key named, so typos
fail loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

import copy
import json

from .converters import ConverterSpec
from .envs import EnvConfig
from .errors import ConfigError
from .motors import DcMotorParams, LoadParams, PmsmParams
from .references import ReferenceConfig

_TOP_KEYS = {
    "motor", "motor_params", "load_params", "converter", "tau",
    "integrator", "integrator_rel_tol", "integrator_abs_tol",
    "episode_length", "prediction_horizon", "reward_function",
    "reward_weights", "safety_margin", "nominal_values", "noise_levels",
    "limit_penalty", "penalty_constant", "penalty_gamma",
    "zero_references", "seed", "reference",
}
_CONVERTER_KEYS = {"topology", "mode", "u_sup", "interlocking_time", "dead_time"}
_LOAD_KEYS = {"a", "b", "c", "j_load"}
_DC_KEYS = {"r_a", "r_e", "l_a", "l_e", "l_e_prime", "psi_e_prime", "j_rotor"}
_PMSM_KEYS = {"r_s", "l_d", "l_q", "p", "psi_p", "j_rotor"}
_REFERENCE_KEYS = {"probabilities", "period_fraction",
                   "fourier_cutoff_divisor", "fourier_max_retries"}


def _check_keys(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(
            f"unknown configuration key(s) in {where}: {sorted(unknown)}")


def config_from_dict(d: dict) -> EnvConfig:
    """Build a validated :class:`EnvConfig` from the file schema."""
    if not isinstance(d, dict):
        raise ConfigError("configuration root must be a mapping")
    _check_keys(d, _TOP_KEYS, "configuration")
    for required in ("motor", "motor_params", "converter", "nominal_values",
                     "reward_weights"):
        if required not in d:
            raise ConfigError(f"missing configuration key {required!r}")

    motor = d["motor"]
    params_dict = dict(d["motor_params"])
    if motor == "pmsm":
        _check_keys(params_dict, _PMSM_KEYS, "motor_params")
        motor_params = PmsmParams(**params_dict)
    else:
        _check_keys(params_dict, _DC_KEYS, "motor_params")
        motor_params = DcMotorParams(**params_dict)

    load_dict = dict(d.get("load_params", {}))
    _check_keys(load_dict, _LOAD_KEYS, "load_params")
    conv_dict = dict(d["converter"])
    _check_keys(conv_dict, _CONVERTER_KEYS, "converter")
    ref_dict = dict(d.get("reference", {}))
    _check_keys(ref_dict, _REFERENCE_KEYS, "reference")
    if "probabilities" in ref_dict:
        ref_dict["probabilities"] = tuple(ref_dict["probabilities"])
    if "period_fraction" in ref_dict:
        ref_dict["period_fraction"] = tuple(ref_dict["period_fraction"])

    kwargs = {k: d[k] for k in d
              if k in _TOP_KEYS - {"motor", "motor_params", "load_params",
                                   "converter", "reference", "zero_references"}}
    try:
        return EnvConfig(
            motor=motor,
            motor_params=motor_params,
            load_params=LoadParams(**load_dict),
            converter=ConverterSpec(**conv_dict),
            zero_references=tuple(d.get("zero_references", ())),
            reference=ReferenceConfig(**ref_dict),
            **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg: EnvConfig) -> dict:
    """Inverse of :func:`config_from_dict` (canonical file schema)."""
    params = cfg.motor_params
    if isinstance(params, PmsmParams):
        motor_params = {k: getattr(params, k) for k in sorted(_PMSM_KEYS)}
    else:
        motor_params = {k: getattr(params, k) for k in sorted(_DC_KEYS)}
    return {
        "motor": cfg.motor,
        "motor_params": motor_params,
        "load_params": {k: getattr(cfg.load_params, k) for k in sorted(_LOAD_KEYS)},
        "converter": {k: getattr(cfg.converter, k) for k in sorted(_CONVERTER_KEYS)},
        "tau": cfg.tau,
        "integrator": cfg.integrator,
        "integrator_rel_tol": cfg.integrator_rel_tol,
        "integrator_abs_tol": cfg.integrator_abs_tol,
        "episode_length": cfg.episode_length,
        "prediction_horizon": cfg.prediction_horizon,
        "reward_function": cfg.reward_function,
        "reward_weights": dict(cfg.reward_weights),
        "safety_margin": cfg.safety_margin,
        "nominal_values": dict(cfg.nominal_values),
        "noise_levels": dict(cfg.noise_levels),
        "limit_penalty": cfg.limit_penalty,
        "penalty_constant": cfg.penalty_constant,
        "penalty_gamma": cfg.penalty_gamma,
        "zero_references": list(cfg.zero_references),
        "seed": cfg.seed,
        "reference": {
            "probabilities": list(cfg.reference.probabilities),
            "period_fraction": list(cfg.reference.period_fraction),
            "fourier_cutoff_divisor": cfg.reference.fourier_cutoff_divisor,
            "fourier_max_retries": cfg.reference.fourier_max_retries,
        },
    }


def load_config(path) -> EnvConfig:
    """Read and validate a JSON configuration file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(data)


def save_config(config_dict: dict, path):
    with open(path, "w") as fh:
        json.dump(config_dict, fh, indent=2, sort_keys=True)
        fh.write("\n")


# reward weights define the control task (which entries are tracked), so an
# override replaces them wholesale instead of merging entry by entry
_REPLACE_KEYS = {"reward_weights", "zero_references"}


def merge_overrides(base: dict, overrides: dict) -> dict:
    """Deep-merge override keys into a base configuration dictionary."""
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if (key not in _REPLACE_KEYS and isinstance(value, dict)
                and isinstance(out.get(key), dict)):
            out[key] = merge_overrides(out[key], value)
        else:
            out[key] = value
    return out
