"""Integrator accuracy study on the excitation circuit, whose step response
has the closed form (u/R)(1 - exp(-t R/L)): global error versus step size
for explicit Euler, RK4 and the adaptive method."""

import math
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from motorgym.integrators import IntegratorChoice, integrate_horizon

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

R, L, U = 1.0, 1.6e-3, 1.0
HORIZON = 2 * L / R
EXACT = (U / R) * (1 - math.exp(-HORIZON * R / L))

rhs = lambda y: np.array([(U - R * y[0]) / L])
taus = np.array([4e-4, 2e-4, 1e-4, 5e-5, 2.5e-5, 1.25e-5])

fig, ax = plt.subplots(figsize=(6.5, 4.5))
for method in ("euler", "rk4", "dopri45"):
    errors = []
    for h in taus:
        out = integrate_horizon(IntegratorChoice(method, float(h)), rhs, [0.0],
                                round(HORIZON / h))
        errors.append(abs(out[0] - EXACT))
    ax.loglog(taus, errors, "o-", label=method)
    slope = np.polyfit(np.log(taus), np.log(np.maximum(errors, 1e-17)), 1)[0]
    print(f"{method}: measured order {slope:.2f}")
ax.set_xlabel("step size [s]")
ax.set_ylabel("end-point error [A]")
ax.grid(which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "integrator_orders.png", dpi=120)
print(f"wrote {OUT / 'integrator_orders.png'}")
