"""Dynamic average models of the power-electronic converters feeding the
motors.

Switching waveforms are replaced by their per-sampling-period mean voltage.
In continuous mode the action is a per-channel duty cycle; in discrete mode
it is a direct switching command.  Two secondary effects are modeled:

* an optional dead time of one sampling step between commanding an action
  and it reaching the converter (realized by :class:`ActionBuffer`), and
* the interlocking interval of a half bridge, which distorts the averaged
  output voltage by ``u_sup * t_interlock / tau`` with the sign of the
  output current (applied in continuous mode to the half-bridge topologies).

Discrete command encodings
--------------------------
1QC   0 -> 0 V (switch open), 1 -> u_sup.
2QC   0 -> 0 V (low switch on), 1 -> u_sup (high switch on),
      2 -> both switches off: the diodes conduct, u = u_sup if i < 0 else 0.
4QC   two half bridges, bit 0 = left leg high, bit 1 = right leg high:
      0 -> 0 V, 1 -> +u_sup, 2 -> -u_sup, 3 -> 0 V.
B6    3-bit code, bit k = phase k upper switch closed (bit 0 = phase a):
      phase voltage +u_sup/2 if the bit is set, else -u_sup/2.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError

TOPOLOGIES = ("1QC", "2QC", "4QC", "B6")
MODES = ("discrete", "continuous")

DISCRETE_CARDINALITY = {"1QC": 2, "2QC": 3, "4QC": 4, "B6": 8}

# Normalized duty range per topology (continuous mode).
DUTY_RANGE = {"1QC": (0.0, 1.0), "2QC": (0.0, 1.0),
              "4QC": (-1.0, 1.0), "B6": (-1.0, 1.0)}

# Topologies with an interlocked half bridge; 1QC has a single switch.
_INTERLOCKED = ("2QC", "4QC", "B6")


@dataclass(frozen=True)
class ConverterSpec:
    """One converter unit: topology, action mode, supply voltage, and the
    secondary-effect settings."""

    topology: str
    mode: str
    u_sup: float
    interlocking_time: float = 0.0
    dead_time: bool = False

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ConfigError(
                f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown converter mode {self.mode!r}")
        if not self.u_sup > 0.0:
            raise ConfigError("ConverterSpec.u_sup must be > 0")
        if self.interlocking_time < 0.0:
            raise ConfigError("ConverterSpec.interlocking_time must be >= 0")

    @property
    def channels(self) -> int:
        """Output voltage channels of this unit (3 for B6, 1 otherwise)."""
        return 3 if self.topology == "B6" else 1

    def voltage_range(self) -> tuple[float, float]:
        """Admissible averaged output voltage per channel."""
        if self.topology == "B6":
            return (-0.5 * self.u_sup, 0.5 * self.u_sup)
        lo, hi = DUTY_RANGE[self.topology]
        return (lo * self.u_sup, hi * self.u_sup)

    def zero_action(self):
        """The action producing zero differential output voltage."""
        if self.mode == "discrete":
            return 0
        return np.zeros(self.channels)


@dataclass(frozen=True)
class ActionSpaceDescriptor:
    """Shape of the admissible actions for one environment.

    ``kind`` is "discrete" or "continuous".  Discrete spaces list the command
    cardinality per channel; continuous spaces list per-channel duty bounds.
    Single-channel discrete actions are plain integers; multi-channel actions
    are sequences of per-channel values.
    """

    kind: str
    channels: int
    cardinalities: tuple = ()
    low: tuple = ()
    high: tuple = ()

    def contains(self, action) -> bool:
        try:
            values = self._as_channels(action)
        except (TypeError, ValueError, InputError):
            return False
        if self.kind == "discrete":
            return all(
                float(v).is_integer() and 0 <= int(v) < n
                for v, n in zip(values, self.cardinalities))
        return all(math.isfinite(float(v)) for v in values)

    def sample(self, rng: np.random.Generator):
        if self.kind == "discrete":
            cmds = [int(rng.integers(n)) for n in self.cardinalities]
            return cmds[0] if self.channels == 1 else tuple(cmds)
        duty = rng.uniform(self.low, self.high)
        return float(duty[0]) if self.channels == 1 else duty

    def _as_channels(self, action) -> tuple:
        if np.ndim(action) == 0:
            values = (action,)
        else:
            values = tuple(np.asarray(action, dtype=float).ravel())
        if len(values) != self.channels:
            raise InputError(
                f"action needs {self.channels} channel(s), got {len(values)}")
        return values


def action_space(spec: ConverterSpec, n_units: int = 1) -> ActionSpaceDescriptor:
    """Descriptor for ``n_units`` converter units of the same topology
    (two units for the externally excited motor's dual converter)."""
    if n_units > 1 and spec.topology == "B6":
        raise ConfigError("dual-converter composition is defined for DC topologies only")
    if spec.mode == "discrete":
        n = DISCRETE_CARDINALITY[spec.topology]
        return ActionSpaceDescriptor(
            kind="discrete", channels=n_units, cardinalities=(n,) * n_units)
    lo, hi = DUTY_RANGE[spec.topology]
    channels = spec.channels * n_units
    return ActionSpaceDescriptor(
        kind="continuous", channels=channels,
        low=(lo,) * channels, high=(hi,) * channels)


def _sign(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def convert_continuous(spec: ConverterSpec, duty, i_sign, tau: float):
    """Averaged output voltage for a duty-cycle action.

    Out-of-range duties are clamped to the admissible range; the returned
    flag reports whether clamping occurred.  The interlocking correction
    ``u_sup * t_interlock / tau * sign(i)`` is subtracted per channel for the
    half-bridge topologies and the result is clamped to the physically
    reachable voltage range.

    Returns
    -------
    (u, clamped) : (np.ndarray, bool)
        Per-channel averaged voltage and the duty-clamping flag.
    """
    if spec.channels == 1 and np.ndim(duty) == 0:
        return _convert_continuous_scalar(spec, float(duty), i_sign, tau)
    duty_arr = np.atleast_1d(np.asarray(duty, dtype=float))
    if duty_arr.size != spec.channels:
        raise InputError(
            f"{spec.topology} expects {spec.channels} duty channel(s), "
            f"got {duty_arr.size}")
    if not np.all(np.isfinite(duty_arr)):
        raise InputError(f"non-finite duty cycle: {duty_arr}")
    lo, hi = DUTY_RANGE[spec.topology]
    clipped = np.clip(duty_arr, lo, hi)
    clamped = bool(np.any(clipped != duty_arr))

    gain = 0.5 * spec.u_sup if spec.topology == "B6" else spec.u_sup
    u = clipped * gain
    if spec.topology in _INTERLOCKED and spec.interlocking_time > 0.0:
        signs = np.array([_sign(s) for s in np.atleast_1d(i_sign)], dtype=float)
        if signs.size == 1 and spec.channels > 1:
            signs = np.full(spec.channels, signs[0])
        u = u - spec.u_sup * (spec.interlocking_time / tau) * signs
    u_lo, u_hi = spec.voltage_range()
    return np.clip(u, u_lo, u_hi), clamped


def _convert_continuous_scalar(spec: ConverterSpec, duty: float, i_sign,
                               tau: float):
    """Single-channel fast path of :func:`convert_continuous`."""
    if math.isnan(duty):
        raise InputError("non-finite duty cycle")
    lo, hi = DUTY_RANGE[spec.topology]
    clipped = min(max(duty, lo), hi)
    clamped = clipped != duty
    u = clipped * spec.u_sup
    if spec.interlocking_time > 0.0 and spec.topology in _INTERLOCKED:
        s = i_sign[0] if np.ndim(i_sign) else i_sign
        u -= spec.u_sup * (spec.interlocking_time / tau) * _sign(float(s))
        u_lo, u_hi = spec.voltage_range()
        u = min(max(u, u_lo), u_hi)
    return np.array((u,)), clamped


def convert_discrete(spec: ConverterSpec, switch_cmd: int, i_sign) -> np.ndarray:
    """Output voltage for a direct switching command (encodings above)."""
    if not float(switch_cmd).is_integer():
        raise InputError(f"discrete command must be an integer, got {switch_cmd!r}")
    cmd = int(switch_cmd)
    n = DISCRETE_CARDINALITY[spec.topology]
    if not 0 <= cmd < n:
        raise InputError(
            f"{spec.topology} command must be in [0, {n}), got {cmd}")
    u_sup = spec.u_sup
    if spec.topology == "1QC":
        return np.array([u_sup if cmd == 1 else 0.0])
    if spec.topology == "2QC":
        if cmd == 0:
            return np.array([0.0])
        if cmd == 1:
            return np.array([u_sup])
        # both switches off: diode freewheeling
        sign = _sign(float(np.atleast_1d(i_sign)[0]))
        return np.array([u_sup if sign < 0.0 else 0.0])
    if spec.topology == "4QC":
        left = cmd & 1
        right = (cmd >> 1) & 1
        return np.array([(left - right) * u_sup])
    # B6: one bit per phase
    return np.array([(0.5 if (cmd >> k) & 1 else -0.5) * u_sup for k in range(3)])


def convert(spec: ConverterSpec, action, i_sign, tau: float):
    """Dispatch on the converter mode; returns (u, clamped)."""
    if spec.mode == "discrete":
        return convert_discrete(spec, action, i_sign), False
    return convert_continuous(spec, action, i_sign, tau)


@dataclass
class ActionBuffer:
    """One-step FIFO realizing the converter dead time.

    With ``enabled`` the buffer returns the previously queued action and
    queues the new one, so an action takes effect one sampling step after it
    was commanded.  On reset the queue holds the zero-voltage action.
    """

    zero_action: object
    enabled: bool
    _queue: deque = field(default_factory=deque, repr=False)

    def __post_init__(self):
        self.reset()

    def reset(self):
        self._queue.clear()
        if self.enabled:
            self._queue.append(self.zero_action)

    def push(self, action):
        if not self.enabled:
            return action
        self._queue.append(action)
        return self._queue.popleft()
