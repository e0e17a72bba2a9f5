"""Default drive configurations.

``series`` ships the documented 420 V / 50 A example drive verbatim as the
package default.  Note that its catalogue load coefficients describe a very
heavy mill-type load: with ``c = 0.1 Nm s^2`` the steady-state speed at
nominal current is a few rad/s, so speed references spanning the nominal
band are mostly unreachable.  For closed-loop benchmarking use
:func:`speed_benchmark_dict`, which pairs the same electrical machine with a
light mechanical load whose steady state at nominal current sits at nominal
speed, making the whole reference band dynamically reachable.

All presets are plain dictionaries in the configuration-file schema
(:mod:`motorgym.config`), so they can be merged with user overrides and
serialized as-is.
"""

from __future__ import annotations

import copy


def series_motor_dict() -> dict:
    return {
        "r_a": 2.78, "r_e": 1.0,
        "l_a": 6.3e-3, "l_e": 1.6e-3, "l_e_prime": 0.5e-3,
        "j_rotor": 17e-3,
    }


def series_defaults() -> dict:
    """The example series drive: 420 V supply, 50 A / 368 rad/s nominal."""
    return {
        "motor": "series",
        "motor_params": series_motor_dict(),
        "load_params": {"a": 0.01, "b": 0.12, "c": 0.1, "j_load": 1.0},
        "converter": {"topology": "1QC", "mode": "continuous", "u_sup": 420.0},
        "tau": 1e-4,
        "nominal_values": {"omega": 368.0, "torque": 250.0, "i": 50.0},
        "reward_weights": {"omega": 1.0},
        "reward_function": "swsae",
        "safety_margin": 1.3,
    }


def speed_benchmark_dict() -> dict:
    """Series-drive speed-control benchmark profile.

    Same electrical machine as :func:`series_defaults`, but with a light
    mechanical load chosen so the drive can sweep its whole nominal band in
    both directions:

    * torque balance at nominal speed needs ~94 % of nominal current
      (``c * w_n^2 + b * w_n + a ~= 1.1 Nm`` against the 1.25 Nm available),
      so sustained references up to the nominal clipping level are reachable
      with regulation headroom;
    * the viscous term supplies braking drag, which a unidirectional buck
      converter cannot (coast-down is load-driven);
    * the inertia gives a zero-to-nominal ramp of roughly 50 ms, matching
      the reference periods the generator draws.
    """
    cfg = series_defaults()
    cfg["motor_params"]["j_rotor"] = 1.5e-4
    cfg["load_params"] = {"a": 0.01, "b": 1.5e-3, "c": 4e-6, "j_load": 0.0}
    cfg["episode_length"] = 10_000
    cfg["prediction_horizon"] = 1
    cfg["limit_penalty"] = "zero"
    return cfg


def permex_defaults() -> dict:
    return {
        "motor": "permex",
        "motor_params": {
            "r_a": 2.78, "r_e": 1.0, "l_a": 6.3e-3, "l_e": 1.6e-3,
            "l_e_prime": 0.5e-3, "psi_e_prime": 0.764, "j_rotor": 0.02,
        },
        "load_params": {"a": 0.01, "b": 1e-3, "c": 1e-4, "j_load": 0.0},
        "converter": {"topology": "1QC", "mode": "continuous", "u_sup": 420.0},
        "tau": 1e-4,
        "nominal_values": {"omega": 368.0, "torque": 40.0, "i": 50.0},
        "reward_weights": {"omega": 1.0},
        "reward_function": "swsae",
        "safety_margin": 1.3,
    }


def _wound_field_motor() -> dict:
    # armature as in the series drive; high-resistance field winding
    return {
        "r_a": 2.78, "r_e": 200.0,
        "l_a": 6.3e-3, "l_e": 10.0, "l_e_prime": 0.364,
        "j_rotor": 0.02,
    }


def shunt_defaults() -> dict:
    return {
        "motor": "shunt",
        "motor_params": _wound_field_motor(),
        "load_params": {"a": 0.01, "b": 1e-3, "c": 1e-4, "j_load": 0.0},
        "converter": {"topology": "1QC", "mode": "continuous", "u_sup": 420.0},
        "tau": 1e-4,
        # field current at full supply is 2.1 A; nominal sits just below
        "nominal_values": {"omega": 368.0, "torque": 40.0, "i_a": 50.0, "i_e": 2.0},
        "reward_weights": {"omega": 1.0},
        "reward_function": "swsae",
        "safety_margin": 1.3,
    }


def extex_defaults() -> dict:
    cfg = shunt_defaults()
    cfg["motor"] = "extex"
    return cfg


def pmsm_defaults() -> dict:
    """Three-phase synchronous drive on a B6 bridge; current control with a
    two-step reference window by default."""
    return {
        "motor": "pmsm",
        "motor_params": {
            "r_s": 0.78, "l_d": 1.2e-3, "l_q": 1.4e-3,
            "p": 3, "psi_p": 0.08, "j_rotor": 2.5e-3,
        },
        "load_params": {"a": 0.01, "b": 1e-3, "c": 1e-5, "j_load": 0.0},
        "converter": {"topology": "B6", "mode": "continuous", "u_sup": 420.0},
        "tau": 1e-4,
        # speed entry is the electrical angular velocity (p * mechanical)
        "nominal_values": {"omega": 780.0, "torque": 12.0, "i": 30.0},
        "reward_weights": {"i_a": 1 / 3, "i_b": 1 / 3, "i_c": 1 / 3},
        "reward_function": "swsae",
        "prediction_horizon": 2,
        "safety_margin": 1.3,
    }


DEFAULTS = {
    "series": series_defaults,
    "permex": permex_defaults,
    "shunt": shunt_defaults,
    "extex": extex_defaults,
    "pmsm": pmsm_defaults,
}


def preset_dict(motor: str, mode: str) -> dict:
    """Default configuration dictionary for one motor/action-mode pair."""
    cfg = copy.deepcopy(DEFAULTS[motor]())
    cfg["converter"]["mode"] = mode
    return cfg
