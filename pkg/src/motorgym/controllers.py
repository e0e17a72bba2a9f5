"""Classical baseline controllers for benchmarking learned agents.

* :class:`PiCascade` -- cascaded PI speed control for continuous-action DC
  drives: an inner current loop tuned by the magnitude-optimum rule on the
  electrical time constant, an outer speed loop tuned by the
  symmetric-optimum rule on the mechanical dynamics.  The current set-point
  is clamped to the nominal current (never the safety-scaled limit), both
  loops use conditional integration as anti-windup, and the duty output
  saturates at the action-space range.
* :class:`HysteresisController` -- on/off control for discrete-action DC
  drives: switch on below ``reference - band``, off above
  ``reference + band``, hold in between.

Controllers implement ``reset()`` and ``act(observation) -> action`` and are
owned by a single episode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envs import MotorEnv
from .errors import ConfigError

# lumped small time constant of the actuation path (zero-order hold plus
# computation delay), as a multiple of the sampling period
_SIGMA_DELAY_STEPS = 1.5


@dataclass(frozen=True)
class PiGains:
    """Cascade gains in normalized coordinates (observation units)."""

    kp_speed: float
    ki_speed: float
    kp_current: float
    ki_current: float

    def __post_init__(self):
        for name in ("kp_speed", "ki_speed", "kp_current", "ki_current"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"PiGains.{name} must be > 0")


def _electrical_constants(env: MotorEnv):
    """(resistance, inductance, torque constant) of the armature loop."""
    p = env.config.motor_params
    kind = env.config.motor
    i_nom = env.nominal[env.entries.index("i" if kind in ("series", "permex")
                                          else "i_a")]
    if kind == "series":
        return p.r_a + p.r_e, p.l_a + p.l_e, p.l_e_prime * i_nom
    if kind == "permex":
        return p.r_a, p.l_a, p.psi_e_prime
    if kind in ("shunt", "extex"):
        # field current at full supply voltage sets the effective flux
        return p.r_a, p.l_a, p.l_e_prime * env.config.converter.u_sup / p.r_e
    raise ConfigError(f"PI cascade supports DC drives only, not {kind!r}")


def tune_pi(env: MotorEnv) -> PiGains:
    """Magnitude-optimum current loop, symmetric-optimum speed loop.

    Inner loop: plant ``(u_sup / R) / (1 + s L/R)`` behind the lumped
    actuation delay ``sigma = 1.5 tau``; the PI zero cancels the electrical
    pole (``T_n = L/R``) and ``K_p = (L/R) R / (2 u_sup sigma)``.

    Outer loop: the closed current loop is approximated by a first-order lag
    of ``2 sigma``; for the integrating mechanical plant ``K_T / (J s)`` the
    symmetric optimum gives ``K_p = J / (2 K_T (2 sigma))`` and
    ``T_n = 4 (2 sigma)``.

    Gains are returned in normalized units (errors and outputs as seen in the
    observation).
    """
    cfg = env.config
    r, l, k_t = _electrical_constants(env)
    tau_e = l / r
    sigma = _SIGMA_DELAY_STEPS * cfg.tau
    if not (tau_e > 0.0 and k_t > 0.0):
        raise ConfigError("degenerate time constants; cannot tune the cascade")
    u_sup = cfg.converter.u_sup
    kp_i = tau_e * r / (2.0 * u_sup * sigma)
    ki_i = kp_i / tau_e

    j_total = cfg.motor_params.j_rotor + cfg.load_params.j_load
    tau_eq = 2.0 * sigma
    kp_w = j_total / (2.0 * k_t * tau_eq)
    ki_w = kp_w / (4.0 * tau_eq)

    omega_lim = env.limits[env.entries.index("omega")]
    kind = cfg.motor
    i_lim = env.limits[env.entries.index("i" if kind in ("series", "permex")
                                         else "i_a")]
    return PiGains(
        kp_speed=kp_w * omega_lim / i_lim,
        ki_speed=ki_w * omega_lim / i_lim,
        kp_current=kp_i * i_lim,
        ki_current=ki_i * i_lim,
    )


class PiCascade:
    """Cascaded speed/current PI controller over normalized observations."""

    def __init__(self, env: MotorEnv, gains: PiGains | None = None):
        if env.action_space.kind != "continuous":
            raise ConfigError("the PI cascade emits duty cycles; use a "
                              "continuous-action environment")
        if "omega" not in env.tracked:
            raise ConfigError("PI speed control needs a tracked speed entry")
        self.gains = gains if gains is not None else tune_pi(env)
        self.tau = env.config.tau
        kind = env.config.motor
        entries = env.entries
        self._omega_idx = entries.index("omega")
        self._i_idx = entries.index("i" if kind in ("series", "permex") else "i_a")
        self._ref_idx = (len(entries)
                         + env.tracked.index("omega") * env.config.prediction_horizon)
        xi = env.config.safety_margin
        i_low = env.observation_space.low[self._i_idx]
        # set-point capped at the nominal current, not the scaled limit
        self._i_ref_lo = (1.0 / xi) * i_low
        self._i_ref_hi = 1.0 / xi
        self._duty_lo = env.action_space.low[0]
        self._duty_hi = env.action_space.high[0]
        self._n_duty = env.action_space.channels
        self._extex_field_duty = None
        if kind == "extex":
            p = env.config.motor_params
            i_e_nom = env.nominal[entries.index("i_e")]
            self._extex_field_duty = float(
                np.clip(p.r_e * i_e_nom / env.config.converter.u_sup,
                        self._duty_lo, self._duty_hi))
        self.reset()

    def reset(self):
        self._int_speed = 0.0
        self._int_current = 0.0

    @staticmethod
    def _pi(error, kp, integ, lo, hi):
        raw = kp * error + integ
        sat = min(max(raw, lo), hi)
        # conditional integration: freeze while pushing further into the clamp
        frozen = (sat >= hi and error > 0.0) or (sat <= lo and error < 0.0)
        return sat, frozen

    def act(self, obs) -> object:
        omega = float(obs[self._omega_idx])
        omega_ref = float(obs[self._ref_idx])
        current = float(obs[self._i_idx])

        e_w = omega_ref - omega
        i_ref, frozen_w = self._pi(e_w, self.gains.kp_speed, self._int_speed,
                                   self._i_ref_lo, self._i_ref_hi)
        if not frozen_w:
            self._int_speed += self.gains.ki_speed * self.tau * e_w

        e_i = i_ref - current
        duty, frozen_i = self._pi(e_i, self.gains.kp_current, self._int_current,
                                  self._duty_lo, self._duty_hi)
        if not frozen_i:
            self._int_current += self.gains.ki_current * self.tau * e_i

        if self._extex_field_duty is not None:
            return np.array((duty, self._extex_field_duty))
        return duty if self._n_duty == 1 else np.full(self._n_duty, duty)


# commands raising / lowering the output voltage, per DC topology
_HYSTERESIS_CMDS = {"1QC": (1, 0), "2QC": (1, 0), "4QC": (1, 0)}


class HysteresisController:
    """Two-point controller for discrete-action DC drives."""

    def __init__(self, env: MotorEnv, band: float = 0.05,
                 tracked_entry: str | None = None):
        if env.action_space.kind != "discrete":
            raise ConfigError("hysteresis control needs a discrete action space")
        topo = env.config.converter.topology
        if topo not in _HYSTERESIS_CMDS:
            raise ConfigError(f"hysteresis control is undefined for {topo!r}")
        if not band > 0.0:
            raise ConfigError("hysteresis band must be > 0")
        entry = tracked_entry if tracked_entry is not None else env.tracked[0]
        if entry not in env.tracked:
            raise ConfigError(f"{entry!r} is not a tracked entry")
        self.band = band
        self.on_cmd, self.off_cmd = _HYSTERESIS_CMDS[topo]
        self._value_idx = env.entries.index(entry)
        self._ref_idx = (len(env.entries)
                         + env.tracked.index(entry) * env.config.prediction_horizon)
        self._multi = env.action_space.channels > 1
        self.reset()

    def reset(self):
        self._last = self.off_cmd

    def act(self, obs) -> object:
        value = float(obs[self._value_idx])
        ref = float(obs[self._ref_idx])
        if value < ref - self.band:
            self._last = self.on_cmd
        elif value > ref + self.band:
            self._last = self.off_cmd
        if self._multi:
            return (self._last,) * 2
        return self._last


class ConstantController:
    """Plays one fixed action; handy as a do-nothing baseline."""

    def __init__(self, action):
        self.action = action

    def reset(self):
        pass

    def act(self, obs):
        return self.action
