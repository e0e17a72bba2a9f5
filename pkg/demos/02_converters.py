"""Converter behavior: discrete voltage tables, duty-cycle linearity, and
the interlocking-time distortion versus current direction."""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from motorgym.converters import (DISCRETE_CARDINALITY, ConverterSpec,
                                 convert_continuous, convert_discrete)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)
TAU = 1e-4
U = 420.0

print("discrete switching tables (positive output current):")
for topology in ("1QC", "2QC", "4QC", "B6"):
    spec = ConverterSpec(topology=topology, mode="discrete", u_sup=U)
    rows = [convert_discrete(spec, cmd, [1.0, 1.0, 1.0])
            for cmd in range(DISCRETE_CARDINALITY[topology])]
    print(f"  {topology}: " + ", ".join(
        f"{cmd}->{np.array2string(u, precision=0)}" for cmd, u in enumerate(rows)))

duty = np.linspace(-1.2, 1.2, 241)
fig, ax = plt.subplots(figsize=(7, 4.5))
for topology in ("1QC", "2QC", "4QC"):
    for t_il, style in ((0.0, "-"), (2e-6, "--")):
        spec = ConverterSpec(topology=topology, mode="continuous", u_sup=U,
                             interlocking_time=t_il)
        u_out = [convert_continuous(spec, d, 1.0, TAU)[0][0] for d in duty]
        label = f"{topology}" + (" (interlock)" if t_il else "")
        ax.plot(duty, u_out, style, label=label)
ax.set_xlabel("duty cycle")
ax.set_ylabel("averaged output voltage [V]")
ax.legend(fontsize=8)
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(OUT / "converter_transfer.png", dpi=120)
print(f"wrote {OUT / 'converter_transfer.png'}")

spec = ConverterSpec(topology="2QC", mode="continuous", u_sup=U,
                     interlocking_time=1e-6)
up = convert_continuous(spec, 0.5, +1.0, TAU)[0][0]
dn = convert_continuous(spec, 0.5, -1.0, TAU)[0][0]
print(f"2QC at duty 0.5 with 1 us interlock: {up:.1f} V (i>0) vs {dn:.1f} V (i<0); "
      f"ideal 210.0 V")
