"""Step responses of the five motor models.

Applies a constant voltage to each machine at standstill and plots current
and speed over the first 0.5 s. The series/permex/shunt/extex machines share
the 420 V supply; the synchronous machine gets a small constant q-axis-ish
phase voltage so it creeps along its torque curve.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from motorgym.config import config_from_dict
from motorgym.integrators import IntegratorChoice, step_ode
from motorgym.motors import build_motor
from motorgym.presets import (permex_defaults, pmsm_defaults, shunt_defaults,
                              speed_benchmark_dict)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)
TAU = 1e-4
STEPS = 5000


def rollout(cfg_dict, u_fn, state0):
    cfg = config_from_dict(cfg_dict)
    motor = build_motor(cfg.motor, cfg.motor_params)
    integ = IntegratorChoice("rk4", TAU)
    state = np.asarray(state0, dtype=float)
    states = [state]
    for k in range(STEPS):
        u = u_fn(k)
        state = step_ode(integ, lambda y: motor.derivative(y, u, cfg.load_params),
                         state)
        states.append(state)
    return np.array(states)


t = np.arange(STEPS + 1) * TAU

runs = {
    "series (140 V)": (speed_benchmark_dict(), lambda k: (140.0,), (0.0, 0.0)),
    "permex (140 V)": (permex_defaults(), lambda k: (140.0,), (0.0, 0.0)),
    "shunt (420 V)": (shunt_defaults(), lambda k: (420.0,), (0.0, 0.0, 0.0)),
}

fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
for label, (cfg, u_fn, s0) in runs.items():
    traj = rollout(cfg, u_fn, s0)
    axes[0].plot(t, traj[:, 0], label=label)
    axes[1].plot(t, traj[:, -1], label=label)
axes[0].set_ylabel("current [A]")
axes[1].set_ylabel("speed [rad/s]")
axes[1].set_xlabel("time [s]")
for ax in axes:
    ax.legend()
fig.tight_layout()
fig.savefig(OUT / "dc_step_responses.png", dpi=120)
print(f"wrote {OUT / 'dc_step_responses.png'}")

# synchronous machine: constant phase voltages, watch dq currents and speed
pm = pmsm_defaults()
traj = rollout(pm, lambda k: (8.0, -4.0, -4.0), (0.0, 0.0, 0.0, 0.0))
fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
axes[0].plot(t, traj[:, 0], label="i_sd")
axes[0].plot(t, traj[:, 1], label="i_sq")
axes[1].plot(t, traj[:, 2])
axes[2].plot(t, traj[:, 3])
axes[0].set_ylabel("dq currents [A]")
axes[1].set_ylabel("mech. speed [rad/s]")
axes[2].set_ylabel("mech. angle [rad]")
axes[2].set_xlabel("time [s]")
axes[0].legend()
fig.tight_layout()
fig.savefig(OUT / "pmsm_step_response.png", dpi=120)
print(f"wrote {OUT / 'pmsm_step_response.png'}")
