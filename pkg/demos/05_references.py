"""Gallery of reference trajectories: the four standard shapes and a
band-limited random reference with the voltage sequence that produced it."""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from motorgym.config import config_from_dict
from motorgym.integrators import IntegratorChoice
from motorgym.motors import build_motor
from motorgym.presets import speed_benchmark_dict
from motorgym.references import (ReferenceConfig, generate_random_fourier,
                                 generate_standard)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

XI = 1.3
rng = np.random.default_rng(7)
t = np.arange(3000) * 1e-4

fig, axes = plt.subplots(2, 2, figsize=(9, 5), sharex=True, sharey=True)
for ax, shape in zip(axes.ravel(), ("sinusoid", "triangle", "rectangle",
                                    "sawtooth")):
    for _ in range(3):
        ax.plot(t, generate_standard(shape, 3000, rng, 0.0, 1 / XI, (300, 3000)),
                lw=0.9)
    ax.set_title(shape)
    ax.axhline(1 / XI, color="orange", ls=":", lw=0.8)
for ax in axes[-1]:
    ax.set_xlabel("time [s]")
fig.tight_layout()
fig.savefig(OUT / "standard_shapes.png", dpi=120)
print(f"wrote {OUT / 'standard_shapes.png'}")

cfg = config_from_dict(speed_benchmark_dict())
motor = build_motor(cfg.motor, cfg.motor_params)
limits = cfg.safety_margin * np.array([368.0, 250.0, 50.0, 420.0, 420.0])
traj = generate_random_fourier(
    motor, cfg.converter, cfg.load_params, IntegratorChoice("euler", cfg.tau),
    10_000, rng, ("omega", "torque", "i", "u", "u_sup"), limits, np.zeros(5),
    1 / XI, np.array([0.0, 40.0]), 1, ReferenceConfig())

t = np.arange(10_000) * cfg.tau
fig, axes = plt.subplots(3, 1, figsize=(8, 6), sharex=True)
axes[0].plot(t, traj.duty[:, 0], lw=0.8, color="magenta")
axes[0].set_ylabel("drawn duty")
axes[1].plot(t, traj.values["omega"], lw=0.9)
axes[1].set_ylabel("speed ref (norm)")
axes[2].plot(t, traj.values["i"], lw=0.9)
axes[2].set_ylabel("current ref (norm)")
axes[2].set_xlabel("time [s]")
for ax in axes[1:]:
    ax.axhline(1 / XI, color="orange", ls=":", lw=0.8)
fig.tight_layout()
fig.savefig(OUT / "random_reference.png", dpi=120)
print(f"wrote {OUT / 'random_reference.png'}")
print("random references are recordings of the motor itself, so a controller "
      "can actually follow them")
