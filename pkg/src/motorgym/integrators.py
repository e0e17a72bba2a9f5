"""Fixed- and adaptive-step integrators advancing the motor ODE by one
sampling period.

The input voltage is treated as a zero-order hold over the period, so the
right-hand side passed in here is autonomous.  All methods are deterministic:
identical inputs yield bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericsError

METHODS = ("euler", "rk4", "dopri45")
_ALIASES = {
    "explicit-euler": "euler",
    "euler": "euler",
    "rk4": "rk4",
    "runge-kutta4": "rk4",
    "adaptive-dormand-prince": "dopri45",
    "dopri45": "dopri45",
    "dopri5": "dopri45",
}


@dataclass(frozen=True)
class IntegratorChoice:
    """Discretization method plus its sampling period and, for the adaptive
    method, the local error tolerances."""

    method: str = "euler"
    tau: float = 1e-4
    rel_tol: float = 1e-6
    abs_tol: float = 1e-8

    def __post_init__(self):
        if self.method not in _ALIASES:
            raise ConfigError(
                f"unknown integrator {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "method", _ALIASES[self.method])
        if not self.tau > 0.0:
            raise ConfigError("IntegratorChoice.tau must be > 0")
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ConfigError("integrator tolerances must be > 0")


def _euler(rhs, y: np.ndarray, h: float) -> np.ndarray:
    return y + h * rhs(y)


def _rk4(rhs, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Dormand-Prince 5(4) coefficients.
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)

_MIN_STEP_FRACTION = 1e-12
_MAX_SUBSTEPS = 10_000


def _dopri_step(rhs, y, h):
    """One Dormand-Prince trial step: 5th-order solution and embedded error."""
    k = [rhs(y)]
    for row in _DP_A[1:]:
        yi = y + h * sum(a * ki for a, ki in zip(row, k))
        k.append(rhs(yi))
    y5 = y + h * sum(b * ki for b, ki in zip(_DP_B5, k))
    y4 = y + h * sum(b * ki for b, ki in zip(_DP_B4, k))
    return y5, y5 - y4


def _dopri45(rhs, y: np.ndarray, tau: float, rel_tol: float, abs_tol: float):
    """Adaptive substepping across [0, tau], landing exactly on tau."""
    t = 0.0
    h = tau
    h_min = tau * _MIN_STEP_FRACTION
    for _ in range(_MAX_SUBSTEPS):
        if t >= tau:
            return y
        h = min(h, tau - t)
        y5, err_vec = _dopri_step(rhs, y, h)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            raise NumericsError("non-finite error estimate in adaptive step")
        if err <= 1.0:
            t += h
            y = y5
            growth = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h *= growth
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < h_min:
                raise NumericsError(
                    f"adaptive step size underflow at t={t:.3e} of tau={tau:.3e} "
                    f"(h={h:.3e}, err={err:.3e})")
    raise NumericsError(f"adaptive integrator exceeded {_MAX_SUBSTEPS} substeps")


def step_ode(choice: IntegratorChoice, rhs, state) -> np.ndarray:
    """Advance ``state`` by exactly ``choice.tau`` using ``rhs``.

    Raises :class:`NumericsError` if the result is non-finite or the adaptive
    method cannot satisfy its tolerances.
    """
    y = np.asarray(state, dtype=float)
    if choice.method == "euler":
        out = _euler(rhs, y, choice.tau)
    elif choice.method == "rk4":
        out = _rk4(rhs, y, choice.tau)
    else:
        out = _dopri45(rhs, y, choice.tau, choice.rel_tol, choice.abs_tol)
    # a nan/inf anywhere poisons the sum; cheaper than an elementwise check
    if not math.isfinite(float(out.sum())):
        if not np.all(np.isfinite(out)):
            raise NumericsError(f"integration produced non-finite state: {out}")
    return out


def integrate_horizon(choice: IntegratorChoice, rhs, state, n_steps: int) -> np.ndarray:
    """Apply :func:`step_ode` ``n_steps`` times; convenience for oracles and
    reference generation."""
    y = np.asarray(state, dtype=float)
    for _ in range(n_steps):
        y = step_ode(choice, rhs, y)
    return y
