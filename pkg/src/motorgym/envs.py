"""The drive environments: reset/step loop, action conversion, observation
assembly, rewards, limit observation and noise injection.

One step runs the fixed pipeline

    action -> dead-time buffer -> converter (+ input-voltage noise)
    -> ODE solve over one sampling period -> physical state vector
    -> limit check -> reward or penalty -> observation (+ measurement noise)

Observations are the normalized physical state vector concatenated with, for
every reference-tracked quantity, the next ``prediction_horizon`` normalized
reference values.  All quantities are normalized by their hard limits
``xi * x_nominal``, so in-range values lie in [-1, 1] (or [0, 1] where
negative values cannot occur).  An episode ends when a limit is violated or
after ``episode_length`` steps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .converters import (ActionBuffer, ActionSpaceDescriptor, ConverterSpec,
                         action_space, convert)
from .errors import ConfigError, EpisodeError, InputError
from .integrators import IntegratorChoice, step_ode
from .motors import (ENV_STATE_ENTRIES, TWO_PI, LoadParams, MotorModel,
                     PmsmMotor, ShuntMotor, build_motor)
from .references import ReferenceConfig, generate_episode, reference_slice

REWARD_FUNCTIONS = ("wsae", "wsse", "swsae", "swsse")
PENALTY_MODES = ("zero", "constant", "q-based")


@dataclass(frozen=True)
class EnvConfig:
    """Complete description of one environment instance.

    ``reward_weights`` and ``noise_levels`` map physical-entry names (see
    :data:`motorgym.motors.ENV_STATE_ENTRIES`) to values; entries absent from
    the mapping default to zero.  ``nominal_values`` must cover speed, torque
    and currents; voltage nominals default to the supply voltage and the
    angle nominal to 2 pi.  The shorthand key ``"i"`` applies one nominal (or
    noise level) to every current entry.
    """

    motor: str
    motor_params: object
    load_params: LoadParams
    converter: ConverterSpec
    nominal_values: dict
    reward_weights: dict
    tau: float = 1e-4
    integrator: str = "euler"
    integrator_rel_tol: float = 1e-6
    integrator_abs_tol: float = 1e-8
    episode_length: int = 10_000
    prediction_horizon: int = 1
    reward_function: str = "swsae"
    safety_margin: float = 1.3
    noise_levels: dict = field(default_factory=dict)
    limit_penalty: str = "zero"
    penalty_constant: float = -1.0
    penalty_gamma: float = 0.9
    zero_references: tuple = ()
    seed: int | None = None
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)


class StepResult(NamedTuple):
    """Return value of :meth:`MotorEnv.step`; unpacks like the conventional
    (observation, reward, done, info) tuple."""

    observation: np.ndarray
    reward: float
    done: bool
    info: dict


@dataclass(frozen=True)
class BoxSpace:
    """Axis-aligned box describing the noise-free observation range."""

    low: tuple
    high: tuple

    def contains(self, x) -> bool:
        arr = np.asarray(x, dtype=float)
        return (arr.shape == (len(self.low),)
                and bool(np.all(arr >= np.asarray(self.low) - 1e-12))
                and bool(np.all(arr <= np.asarray(self.high) + 1e-12)))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high)


def normalize(value: float, nominal: float, xi: float) -> float:
    """Normalize a physical value by its hard limit ``xi * nominal``."""
    return value / (xi * nominal)


def reward(norm_state, norm_reference, weights, widths, kind: str) -> float:
    """Tracking reward over normalized quantities.

    Per-entry errors are divided by the entry's normalized range width (2 for
    bipolar, 1 for nonnegative quantities) before weighting, which keeps the
    weighted sums within [0, 1] and hence the rewards within [-1, 0] (wsae,
    wsse) or [0, 1] (shifted variants) for weights summing to one.
    """
    e = np.abs(np.asarray(norm_state, float) - np.asarray(norm_reference, float))
    e = e / np.asarray(widths, float)
    w = np.asarray(weights, float)
    if kind == "wsae":
        return float(-np.sum(w * e))
    if kind == "wsse":
        return float(-np.sum(w * e * e))
    if kind == "swsae":
        return float(1.0 - np.sum(w * e))
    if kind == "swsse":
        return float(1.0 - np.sum(w * e * e))
    raise ConfigError(f"unknown reward function {kind!r}")


def limit_check(raw_state, limits, exempt) -> int | None:
    """Index of the first entry whose magnitude strictly exceeds its limit,
    or None.  Exempt entries (supply voltage, rotor angle) never violate."""
    over = (np.abs(raw_state) > limits) & ~exempt
    if over.any():
        return int(np.argmax(over))
    return None


def violation_penalty(mode: str, gamma: float = 0.9, constant: float = -1.0) -> float:
    """Reward returned on a limit violation: 0, a configured negative
    constant, or the value-function based ``-1 / (1 - gamma)``."""
    if mode == "zero":
        return 0.0
    if mode == "constant":
        return constant
    if mode == "q-based":
        if not 0.0 < gamma < 1.0:
            raise ConfigError("q-based penalty requires 0 < gamma < 1")
        return -1.0 / (1.0 - gamma)
    raise ConfigError(f"unknown limit penalty mode {mode!r}")


def add_noise(vector, noise_levels, xi: float, rng: np.random.Generator) -> np.ndarray:
    """Add independent zero-mean Gaussian noise to each normalized entry.

    The per-entry variance is ``rho_k / (6 * xi^2)``, i.e. the configured
    noise-to-signal power ratio for a quantity spread triangularly over its
    nominal band.  With every level zero the vector is returned unchanged.
    """
    vec = np.asarray(vector, dtype=float)
    rho = np.asarray(noise_levels, dtype=float)
    if not np.any(rho > 0.0):
        return vec
    sigma = np.sqrt(rho / 6.0) / xi
    return vec + sigma * rng.standard_normal(vec.shape)


# Per-motor ODE-state entry names (PMSM is sampled specially on reset).
_STATE_ENTRIES = {
    "extex": ("i_a", "i_e", "omega"),
    "shunt": ("i_a", "i_e", "omega"),
    "series": ("i", "omega"),
    "permex": ("i", "omega"),
}

_INPUT_VOLTAGE_ENTRIES = {
    "extex": ("u_a", "u_e"),
    "shunt": ("u",),
    "series": ("u",),
    "permex": ("u",),
    "pmsm": ("u_a", "u_b", "u_c"),
}


def _entry_lows(motor: str, topology: str) -> dict:
    """Normalized lower bound (0 or -1) per physical entry.

    Zero lower bounds are claimed only where the model structure guarantees
    nonnegativity: unidirectional converter voltages/currents, the series
    machine's quadratic torque, and speeds that cannot be driven negative.
    """
    u_nonneg = topology in ("1QC", "2QC")
    i_nonneg = topology == "1QC"
    lows = {"u_sup": 0.0, "epsilon": 0.0}
    for name in _INPUT_VOLTAGE_ENTRIES[motor]:
        lows[name] = 0.0 if (u_nonneg and motor != "pmsm") else -1.0
    if motor == "series":
        lows.update({"i": 0.0 if i_nonneg else -1.0, "torque": 0.0, "omega": 0.0})
    elif motor == "permex":
        i_lo = 0.0 if i_nonneg else -1.0
        lows.update({"i": i_lo, "torque": i_lo,
                     "omega": 0.0 if i_nonneg else -1.0})
    elif motor == "extex":
        i_a_lo = 0.0 if i_nonneg else -1.0
        i_e_lo = 0.0 if u_nonneg else -1.0
        t_lo = 0.0 if (i_a_lo == 0.0 and i_e_lo == 0.0) else -1.0
        lows.update({"i_a": i_a_lo, "i_e": i_e_lo, "torque": t_lo, "omega": t_lo})
    elif motor == "shunt":
        # armature current can reverse through the excitation branch even on
        # unidirectional converters
        i_e_lo = 0.0 if u_nonneg else -1.0
        lows.update({"i_a": -1.0, "i_e": i_e_lo, "torque": -1.0, "omega": -1.0})
    else:  # pmsm
        lows.update({"i_a": -1.0, "i_b": -1.0, "i_c": -1.0,
                     "torque": -1.0, "omega": -1.0})
    return lows


def _lookup(mapping: dict, entry: str, default=None):
    """Entry lookup with the ``"i"``/``"u"`` shorthand for current/voltage
    groups."""
    if entry in mapping:
        return mapping[entry]
    if entry.startswith("i") and "i" in mapping:
        return mapping["i"]
    if entry.startswith("u") and entry != "u_sup" and "u" in mapping:
        return mapping["u"]
    return default


class MotorEnv:
    """One motor drive environment (single episode state machine).

    Instances are single-threaded; run several instances with independent
    seeds for parallel data collection.
    """

    def __init__(self, config: EnvConfig):
        self.config = config
        self._validate(config)
        self.motor: MotorModel = build_motor(config.motor, config.motor_params)
        self.n_units = 2 if config.motor == "extex" else 1
        self.entries = ENV_STATE_ENTRIES[config.motor]
        self._integrator = IntegratorChoice(
            config.integrator, config.tau,
            config.integrator_rel_tol, config.integrator_abs_tol)

        self._build_schema()
        self.action_space: ActionSpaceDescriptor = action_space(
            config.converter, self.n_units)
        self._buffer = ActionBuffer(self.zero_action(), config.converter.dead_time)
        self._rng = np.random.default_rng(config.seed)
        self._state = None
        self._traj = None
        self._k = 0
        self._done = True

    # -- configuration ---------------------------------------------------

    @staticmethod
    def _validate(cfg: EnvConfig):
        if cfg.motor not in ENV_STATE_ENTRIES:
            raise ConfigError(f"unknown motor kind {cfg.motor!r}")
        if (cfg.motor == "pmsm") != (cfg.converter.topology == "B6"):
            raise ConfigError("B6 feeds the pmsm only; DC topologies feed DC motors")
        if not cfg.tau > 0.0:
            raise ConfigError("tau must be > 0")
        if cfg.converter.interlocking_time >= cfg.tau:
            raise ConfigError("interlocking_time must be smaller than tau")
        if cfg.episode_length < 1:
            raise ConfigError("episode_length must be >= 1")
        if cfg.prediction_horizon < 1:
            raise ConfigError("prediction_horizon must be >= 1")
        if cfg.reward_function not in REWARD_FUNCTIONS:
            raise ConfigError(f"unknown reward function {cfg.reward_function!r}")
        if cfg.limit_penalty not in PENALTY_MODES:
            raise ConfigError(f"unknown limit penalty {cfg.limit_penalty!r}")
        if cfg.limit_penalty == "q-based" and not 0.0 < cfg.penalty_gamma < 1.0:
            raise ConfigError("q-based penalty requires 0 < gamma < 1")
        if cfg.limit_penalty == "constant" and not cfg.penalty_constant < 0.0:
            raise ConfigError("constant limit penalty must be negative")
        if not cfg.safety_margin >= 1.0:
            raise ConfigError("safety_margin must be >= 1")
        entries = ENV_STATE_ENTRIES[cfg.motor]
        for key in cfg.reward_weights:
            if key not in entries:
                raise ConfigError(
                    f"reward weight for unknown entry {key!r}; "
                    f"{cfg.motor} exposes {entries}")
        for key in cfg.noise_levels:
            if key not in entries and key not in ("i", "u"):
                raise ConfigError(f"noise level for unknown entry {key!r}")
        for key in cfg.zero_references:
            if key not in entries:
                raise ConfigError(f"zero reference for unknown entry {key!r}")
            if cfg.reward_weights.get(key, 0.0) <= 0.0:
                warnings.warn(
                    f"zero reference on {key!r} has no effect without a "
                    f"reward weight", stacklevel=3)
        weight_sum = sum(cfg.reward_weights.values())
        if abs(weight_sum - 1.0) > 1e-9:
            warnings.warn(
                f"reward weights sum to {weight_sum:g}; they should sum to 1 "
                f"for rewards bounded by [-1, 0] / [0, 1]", stacklevel=3)
        if any(w < 0 for w in cfg.reward_weights.values()):
            raise ConfigError("reward weights must be nonnegative")
        if not any(w > 0 for w in cfg.reward_weights.values()):
            raise ConfigError("at least one reward weight must be positive")

    def _build_schema(self):
        cfg = self.config
        xi = cfg.safety_margin
        lows_map = _entry_lows(cfg.motor, cfg.converter.topology)
        nominal, lows, sigma, weights = [], [], [], []
        for name in self.entries:
            if name == "u_sup":
                x_n = _lookup(cfg.nominal_values, "u_sup", cfg.converter.u_sup)
            elif name == "epsilon":
                x_n = _lookup(cfg.nominal_values, "epsilon", TWO_PI)
            elif name.startswith("u"):
                x_n = _lookup(cfg.nominal_values, name, cfg.converter.u_sup)
            else:
                x_n = _lookup(cfg.nominal_values, name)
                if x_n is None:
                    raise ConfigError(f"missing nominal value for {name!r}")
            if not x_n > 0.0:
                raise ConfigError(f"nominal value for {name!r} must be > 0")
            nominal.append(float(x_n))
            lows.append(lows_map[name])
            rho = _lookup(cfg.noise_levels, name, 0.0)
            if rho < 0.0:
                raise ConfigError(f"noise level for {name!r} must be >= 0")
            sigma.append(math.sqrt(rho / 6.0) / xi)
            weights.append(float(cfg.reward_weights.get(name, 0.0)))

        self._x_nom = np.array(nominal)
        self._limits = xi * self._x_nom
        self._lows = np.array(lows)
        self._widths = 1.0 - self._lows
        self._sigma = np.array(sigma)
        self._weights = np.array(weights)
        self._exempt = np.array([n in ("u_sup", "epsilon") for n in self.entries])
        self._uin_entries = _INPUT_VOLTAGE_ENTRIES[cfg.motor]
        self._uin_idx = np.array([self.entries.index(n) for n in self._uin_entries])
        self._meas_sigma = self._sigma.copy()
        self._meas_sigma[self._uin_idx] = 0.0  # voltage noise acts on the input
        self._has_input_noise = bool(np.any(self._sigma[self._uin_idx] > 0.0))
        self._has_meas_noise = bool(np.any(self._meas_sigma > 0.0))
        self.tracked = tuple(n for n in self.entries
                             if cfg.reward_weights.get(n, 0.0) > 0.0)
        self._tracked_idx = np.array([self.entries.index(n) for n in self.tracked])
        # currents forced nonnegative by the 1QC freewheeling diode
        self._clamp_idx = []
        if cfg.converter.topology == "1QC":
            if cfg.motor in ("series", "permex"):
                self._clamp_idx = [0]
            elif cfg.motor == "extex":
                self._clamp_idx = [0, 1]

        horizon = cfg.prediction_horizon
        obs_low = list(self._lows)
        obs_high = [1.0] * len(self.entries)
        ref_cap = 1.0 / xi
        for name in self.tracked:
            lo = lows_map[name] * ref_cap
            obs_low.extend([lo] * horizon)
            obs_high.extend([ref_cap] * horizon)
        self.observation_space = BoxSpace(tuple(obs_low), tuple(obs_high))

    def zero_action(self):
        """The zero-voltage action of this environment's converter."""
        spec = self.config.converter
        if self.n_units == 1:
            return spec.zero_action()
        if spec.mode == "discrete":
            return (0,) * self.n_units
        return np.zeros(self.n_units)

    # -- episode loop ------------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start a new episode: random initial state within the nominal band,
        fresh reference trajectories, cleared action buffer.  Returns the
        initial observation."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._state = self._sample_initial_state()
        length = self.config.episode_length + self.config.prediction_horizon
        self._traj = generate_episode(
            self.motor, self.config.converter, self.config.load_params,
            self._integrator, length, self.config.episode_length, self._rng,
            self.entries, self._limits, self._lows, self.config.safety_margin,
            self.tracked, tuple(self.config.zero_references),
            self._state, self.n_units, self.config.reference)
        self._buffer.reset()
        self._k = 0
        self._done = False
        self._last_u = np.zeros(len(self._uin_idx))
        return self._observe()

    def _sample_initial_state(self) -> np.ndarray:
        cfg = self.config
        rng = self._rng
        nominal = {n: self._x_nom[k] for k, n in enumerate(self.entries)}
        lows_map = _entry_lows(cfg.motor, cfg.converter.topology)
        if cfg.motor == "pmsm":
            # dq currents inside the disk of the nominal phase amplitude so no
            # phase current starts above nominal
            p = cfg.motor_params.p
            r = nominal["i_a"] * math.sqrt(rng.uniform())
            phi = rng.uniform(0.0, TWO_PI)
            omega_me_n = nominal["omega"] / p
            omega_me = rng.uniform(-omega_me_n, omega_me_n)
            eps_me = rng.uniform(0.0, TWO_PI)
            return np.array((r * math.cos(phi), r * math.sin(phi),
                             omega_me, eps_me))
        values = []
        for name in _STATE_ENTRIES[cfg.motor]:
            x_n = nominal[name]
            lo = lows_map[name] * x_n
            values.append(rng.uniform(lo if lo < 0 else 0.0, x_n))
        return np.array(values)

    def _current_signs(self):
        """Per-converter-channel output current, taken before the step."""
        if self.config.motor == "pmsm":
            return self.motor.phase_currents(self._state)
        if self.config.motor == "extex":
            return np.array((self._state[0], self._state[1]))
        if isinstance(self.motor, ShuntMotor):
            return np.array((self.motor.input_current(self._state),))
        return np.array((self._state[0],))

    def _convert_action(self, action):
        """Action -> per-channel input voltage, honoring the dual converter
        of the externally excited motor."""
        spec = self.config.converter
        i_sign = self._current_signs()
        if self.n_units == 1:
            return convert(spec, action, i_sign, self.config.tau)
        parts, clamped = [], False
        values = (tuple(action) if spec.mode == "discrete"
                  else np.atleast_1d(np.asarray(action, dtype=float)))
        for ch in range(self.n_units):
            u, cl = convert(spec, values[ch], i_sign[ch:ch + 1], self.config.tau)
            parts.append(u)
            clamped |= cl
        return np.concatenate(parts), clamped

    def step(self, action) -> StepResult:
        """Advance the drive by one sampling period (pipeline in the module
        docstring)."""
        if self._state is None:
            raise EpisodeError("call reset() before step()")
        if self._done:
            raise EpisodeError("episode finished; call reset()")
        if not self.action_space.contains(action):
            raise InputError(
                f"action {action!r} outside the action space {self.action_space}")

        effective = self._buffer.push(action)
        u_in, clamped = self._convert_action(effective)
        if self._has_input_noise:
            u_sigma = self._sigma[self._uin_idx]
            u_in = u_in + u_sigma * self._limits[self._uin_idx] \
                * self._rng.standard_normal(u_in.shape)

        load = self.config.load_params
        rhs = lambda y: self.motor.derivative(y, u_in, load)
        new_state = step_ode(self._integrator, rhs, self._state)
        if isinstance(self.motor, PmsmMotor):
            new_state = self.motor.wrap_angle(new_state)
        for idx in self._clamp_idx:
            if new_state[idx] < 0.0:
                new_state[idx] = 0.0
        self._state = new_state
        self._last_u = u_in
        self._k += 1

        raw = self.motor.env_state_vector(new_state, u_in, self.config.converter.u_sup)
        norm = raw / self._limits
        violated = limit_check(raw, self._limits, self._exempt)
        if violated is not None:
            r = violation_penalty(self.config.limit_penalty,
                                  self.config.penalty_gamma,
                                  self.config.penalty_constant)
            self._done = True
        else:
            refs_now = reference_slice(self._traj, self.tracked, self._k, 1)
            r = reward(norm[self._tracked_idx], refs_now,
                       self._weights[self._tracked_idx],
                       self._widths[self._tracked_idx],
                       self.config.reward_function)
            self._done = self._k >= self.config.episode_length
        obs = self._observe(norm)
        info = {
            "step": self._k,
            "violation": self.entries[violated] if violated is not None else None,
            "state_raw": raw,
            "state_norm": norm,
            "u_in": u_in.copy(),
            "action_clamped": clamped,
            "reference": reference_slice(self._traj, self.tracked, self._k, 1),
        }
        return StepResult(obs, r, self._done, info)

    def _observe(self, norm: np.ndarray | None = None) -> np.ndarray:
        if norm is None:
            raw = self.motor.env_state_vector(
                self._state, self._last_u, self.config.converter.u_sup)
            norm = raw / self._limits
        if self._has_meas_noise:
            norm = norm + self._meas_sigma * self._rng.standard_normal(norm.shape)
        refs = reference_slice(self._traj, self.tracked, self._k,
                               self.config.prediction_horizon)
        return np.concatenate((norm, refs))

    # -- introspection -----------------------------------------------------

    @property
    def done(self) -> bool:
        return self._done

    @property
    def step_count(self) -> int:
        return self._k

    @property
    def trajectory(self):
        """Reference trajectory of the running episode."""
        return self._traj

    @property
    def limits(self) -> np.ndarray:
        return self._limits.copy()

    @property
    def nominal(self) -> np.ndarray:
        return self._x_nom.copy()

    @property
    def entry_widths(self) -> np.ndarray:
        """Normalized range width per entry (2 bipolar, 1 unipolar)."""
        return self._widths.copy()

    @property
    def tracked_weights(self) -> np.ndarray:
        return self._weights[self._tracked_idx].copy()

    @property
    def tracked_widths(self) -> np.ndarray:
        return self._widths[self._tracked_idx].copy()
