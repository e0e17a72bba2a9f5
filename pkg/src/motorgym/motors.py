"""Continuous-time models of the five supported motors and the mechanical load.

Every motor exposes the same small surface:

* ``derivative(state, u_in, load)`` -- right-hand side of the motor ODE,
* ``torque(state)`` -- electromagnetic torque for a given state,
* ``env_state_vector(state, u_in, u_sup)`` -- the physical quantities the
  environment exposes per step (speed, torque, currents, voltages, supply,
  and for the synchronous machine the electrical rotor angle).

State conventions (ordered vectors):

=========  =====================================
motor      internal ODE state
=========  =====================================
extex      (i_a, i_e, omega)
shunt      (i_a, i_e, omega)
series     (i, omega)
permex     (i, omega)
pmsm       (i_sd, i_sq, omega_me, epsilon_me)
=========  =====================================

DC motors have one pole pair, so the electrical and mechanical angular
velocities coincide.  The synchronous machine is simulated in rotor-fixed
(d, q) coordinates; phase-domain quantities are derived views obtained with
the inverse transforms at the electrical angle ``p * epsilon_me``.

The models are pure functions over immutable parameter sets and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericsError
from .transforms import abc_to_dq, dq_to_abc

TWO_PI = 2.0 * math.pi

MOTOR_KINDS = ("extex", "shunt", "series", "permex", "pmsm")

# Physical quantities exposed per motor, in their fixed order.
ENV_STATE_ENTRIES = {
    "extex": ("omega", "torque", "i_a", "i_e", "u_a", "u_e", "u_sup"),
    "shunt": ("omega", "torque", "i_a", "i_e", "u", "u_sup"),
    "series": ("omega", "torque", "i", "u", "u_sup"),
    "permex": ("omega", "torque", "i", "u", "u_sup"),
    "pmsm": ("omega", "torque", "i_a", "i_b", "i_c",
             "u_a", "u_b", "u_c", "u_sup", "epsilon"),
}


@dataclass(frozen=True)
class DcMotorParams:
    """Electrical and mechanical constants of a DC machine.

    Parameters
    ----------
    r_a, r_e : float
        Armature / excitation resistance in Ohm.
    l_a, l_e : float
        Armature / excitation inductance in H.
    l_e_prime : float
        Effective excitation inductance in H; the effective excitation flux
        of a wound machine is ``l_e_prime * i_e``.
    psi_e_prime : float
        Constant effective excitation flux in Vs, used by the permanently
        excited machine only.
    j_rotor : float
        Rotor moment of inertia in kg m^2.
    """

    r_a: float
    r_e: float
    l_a: float
    l_e: float
    l_e_prime: float
    psi_e_prime: float = 0.0
    j_rotor: float = 1e-3

    def __post_init__(self):
        for name in ("r_a", "r_e", "l_a", "l_e", "l_e_prime", "j_rotor"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"DcMotorParams.{name} must be > 0")
        if self.psi_e_prime < 0.0:
            raise ConfigError("DcMotorParams.psi_e_prime must be >= 0")


@dataclass(frozen=True)
class PmsmParams:
    """Constants of a permanent magnet synchronous machine.

    ``l_d`` / ``l_q`` are the direct / quadrature axis inductances, ``p`` the
    pole-pair count and ``psi_p`` the permanent linked rotor flux in Vs.
    """

    r_s: float
    l_d: float
    l_q: float
    p: int
    psi_p: float
    j_rotor: float

    def __post_init__(self):
        for name in ("r_s", "l_d", "l_q", "j_rotor"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"PmsmParams.{name} must be > 0")
        if not (isinstance(self.p, int) and self.p >= 1):
            raise ConfigError("PmsmParams.p must be an integer >= 1")
        if self.psi_p < 0.0:
            raise ConfigError("PmsmParams.psi_p must be >= 0")


@dataclass(frozen=True)
class LoadParams:
    """Mechanical load: constant torque ``a`` (Nm), viscous friction ``b``
    (Nm s), aerodynamic coefficient ``c`` (Nm s^2) and load inertia ``j_load``
    (kg m^2)."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    j_load: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "j_load"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"LoadParams.{name} must be >= 0")


def load_torque(load: LoadParams, omega_me: float) -> float:
    """Speed-dependent load torque.

    ``sign(omega) * (c * omega^2 + sign(omega) * b * omega + a)`` with
    ``sign(0) = 0``, so the load vanishes at standstill and is odd in the
    speed.
    """
    if omega_me > 0.0:
        return load.c * omega_me * omega_me + load.b * omega_me + load.a
    if omega_me < 0.0:
        return -load.c * omega_me * omega_me + load.b * omega_me - load.a
    return 0.0


def _check_state(state, expected: int, kind: str) -> tuple:
    if len(state) != expected:
        raise ConfigError(
            f"{kind} state must have {expected} entries, got {len(state)}")
    values = tuple(float(v) for v in state)
    for v in values:
        if not math.isfinite(v):
            raise NumericsError(f"non-finite {kind} state: {values}")
    return values


def _check_input(u_in, expected: int, kind: str) -> tuple:
    if np.ndim(u_in) == 0:
        if expected != 1:
            raise ConfigError(
                f"{kind} input voltage must have {expected} entries, got 1")
        return (float(u_in),)
    if len(u_in) != expected:
        raise ConfigError(
            f"{kind} input voltage must have {expected} entries, got {len(u_in)}")
    return tuple(float(v) for v in u_in)


class MotorModel:
    """Base class; concrete models implement the three methods below."""

    kind: str = ""
    n_states: int = 0
    n_inputs: int = 0

    @property
    def entries(self) -> tuple:
        return ENV_STATE_ENTRIES[self.kind]

    def derivative(self, state, u_in, load: LoadParams) -> np.ndarray:
        raise NotImplementedError

    def torque(self, state) -> float:
        raise NotImplementedError

    def env_state_vector(self, state, u_in, u_sup: float) -> np.ndarray:
        raise NotImplementedError


class ExtExMotor(MotorModel):
    """Externally excited DC motor: independent armature and excitation
    circuits, fed by two converter channels (u_a, u_e)."""

    kind = "extex"
    n_states = 3
    n_inputs = 2

    def __init__(self, params: DcMotorParams):
        self.params = params

    def derivative(self, state, u_in, load):
        i_a, i_e, omega = _check_state(state, 3, self.kind)
        u_a, u_e = _check_input(u_in, 2, self.kind)
        p = self.params
        j_total = p.j_rotor + load.j_load
        di_a = (u_a - p.l_e_prime * i_e * omega - p.r_a * i_a) / p.l_a
        di_e = (u_e - p.r_e * i_e) / p.l_e
        domega = (p.l_e_prime * i_e * i_a - load_torque(load, omega)) / j_total
        return np.array((di_a, di_e, domega))

    def torque(self, state):
        i_a, i_e = float(state[0]), float(state[1])
        return self.params.l_e_prime * i_e * i_a

    def env_state_vector(self, state, u_in, u_sup):
        i_a, i_e, omega = (float(v) for v in state)
        u_a, u_e = _check_input(u_in, 2, self.kind)
        return np.array((omega, self.torque(state), i_a, i_e, u_a, u_e, u_sup))


class ShuntMotor(MotorModel):
    """Shunt DC motor: armature and excitation circuits in parallel, one
    shared terminal voltage; the input current is the sum of both branch
    currents."""

    kind = "shunt"
    n_states = 3
    n_inputs = 1

    def __init__(self, params: DcMotorParams):
        self.params = params

    def derivative(self, state, u_in, load):
        i_a, i_e, omega = _check_state(state, 3, self.kind)
        (u,) = _check_input(u_in, 1, self.kind)
        p = self.params
        j_total = p.j_rotor + load.j_load
        di_a = (u - p.l_e_prime * i_e * omega - p.r_a * i_a) / p.l_a
        di_e = (u - p.r_e * i_e) / p.l_e
        domega = (p.l_e_prime * i_e * i_a - load_torque(load, omega)) / j_total
        return np.array((di_a, di_e, domega))

    def torque(self, state):
        i_a, i_e = float(state[0]), float(state[1])
        return self.params.l_e_prime * i_e * i_a

    def input_current(self, state) -> float:
        return float(state[0]) + float(state[1])

    def env_state_vector(self, state, u_in, u_sup):
        i_a, i_e, omega = (float(v) for v in state)
        (u,) = _check_input(u_in, 1, self.kind)
        return np.array((omega, self.torque(state), i_a, i_e, u, u_sup))


class SeriesMotor(MotorModel):
    """Series DC motor: both circuits carry the same current, the terminal
    voltage is the sum of both circuit voltages."""

    kind = "series"
    n_states = 2
    n_inputs = 1

    def __init__(self, params: DcMotorParams):
        self.params = params

    def derivative(self, state, u_in, load):
        i, omega = _check_state(state, 2, self.kind)
        (u,) = _check_input(u_in, 1, self.kind)
        p = self.params
        j_total = p.j_rotor + load.j_load
        di = (-p.l_e_prime * i * omega - (p.r_a + p.r_e) * i + u) / (p.l_a + p.l_e)
        domega = (p.l_e_prime * i * i - load_torque(load, omega)) / j_total
        return np.array((di, domega))

    def torque(self, state):
        i = float(state[0])
        return self.params.l_e_prime * i * i

    def env_state_vector(self, state, u_in, u_sup):
        i, omega = (float(v) for v in state)
        (u,) = _check_input(u_in, 1, self.kind)
        return np.array((omega, self.torque(state), i, u, u_sup))


class PermExMotor(MotorModel):
    """Permanently excited DC motor: constant excitation flux ``psi_e_prime``,
    no excitation circuit."""

    kind = "permex"
    n_states = 2
    n_inputs = 1

    def __init__(self, params: DcMotorParams):
        if params.psi_e_prime <= 0.0:
            raise ConfigError("permex motor requires psi_e_prime > 0")
        self.params = params

    def derivative(self, state, u_in, load):
        i, omega = _check_state(state, 2, self.kind)
        (u,) = _check_input(u_in, 1, self.kind)
        p = self.params
        j_total = p.j_rotor + load.j_load
        di = (-p.psi_e_prime * omega - p.r_a * i + u) / p.l_a
        domega = (p.psi_e_prime * i - load_torque(load, omega)) / j_total
        return np.array((di, domega))

    def torque(self, state):
        return self.params.psi_e_prime * float(state[0])

    def env_state_vector(self, state, u_in, u_sup):
        i, omega = (float(v) for v in state)
        (u,) = _check_input(u_in, 1, self.kind)
        return np.array((omega, self.torque(state), i, u, u_sup))


class PmsmMotor(MotorModel):
    """Permanent magnet synchronous machine in rotor-fixed coordinates.

    The input are the three phase voltages; they are transformed to the
    (d, q) frame at the electrical angle of the evaluated state.  The exposed
    angular velocity and angle are the electrical ones (``p * omega_me`` and
    ``p * epsilon_me`` wrapped to [0, 2 pi)).
    """

    kind = "pmsm"
    n_states = 4
    n_inputs = 3

    def __init__(self, params: PmsmParams):
        self.params = params

    def derivative(self, state, u_in, load):
        i_sd, i_sq, omega_me, eps_me = _check_state(state, 4, self.kind)
        u_abc = _check_input(u_in, 3, self.kind)
        p = self.params
        j_total = p.j_rotor + load.j_load
        u_sd, u_sq = abc_to_dq(u_abc, p.p * eps_me)
        omega_el = omega_me * p.p
        di_sd = (u_sd - p.r_s * i_sd + p.l_q * omega_el * i_sq) / p.l_d
        di_sq = (u_sq - p.r_s * i_sq - omega_el * (p.l_d * i_sd + p.psi_p)) / p.l_q
        domega_me = (self.torque(state) - load_torque(load, omega_me)) / j_total
        return np.array((di_sd, di_sq, domega_me, omega_me))

    def torque(self, state):
        i_sd, i_sq = float(state[0]), float(state[1])
        p = self.params
        return 1.5 * p.p * (p.psi_p + (p.l_d - p.l_q) * i_sd) * i_sq

    def phase_currents(self, state) -> np.ndarray:
        i_sd, i_sq, _, eps_me = (float(v) for v in state)
        return dq_to_abc((i_sd, i_sq), self.params.p * eps_me)

    def wrap_angle(self, state) -> np.ndarray:
        """Wrap the mechanical angle into [0, 2 pi); applied after every
        integration step."""
        out = np.asarray(state, dtype=float).copy()
        out[3] = out[3] % TWO_PI
        return out

    def env_state_vector(self, state, u_in, u_sup):
        i_sd, i_sq, omega_me, eps_me = (float(v) for v in state)
        u_abc = _check_input(u_in, 3, self.kind)
        eps_el = (self.params.p * eps_me) % TWO_PI
        i_abc = dq_to_abc((i_sd, i_sq), self.params.p * eps_me)
        return np.array((omega_me * self.params.p, self.torque(state),
                         i_abc[0], i_abc[1], i_abc[2],
                         u_abc[0], u_abc[1], u_abc[2], u_sup, eps_el))


def build_motor(kind: str, params) -> MotorModel:
    """Instantiate the model for ``kind``, validating the parameter type."""
    classes = {
        "extex": ExtExMotor,
        "shunt": ShuntMotor,
        "series": SeriesMotor,
        "permex": PermExMotor,
        "pmsm": PmsmMotor,
    }
    if kind not in classes:
        raise ConfigError(f"unknown motor kind {kind!r}; expected one of {MOTOR_KINDS}")
    expected = PmsmParams if kind == "pmsm" else DcMotorParams
    if not isinstance(params, expected):
        raise ConfigError(f"motor kind {kind!r} requires {expected.__name__}")
    return classes[kind](params)
