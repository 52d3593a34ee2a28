"""
Continuous-wave laser cooling
=============================

Under a constant drive plus spontaneous emission the emitter reaches a
steady state in which phonons can be pumped out continuously. The laser also
heats the host crystal through background absorption, which grows as Omega^2.
"""

# %%
import numpy as np

from dressedthermo import AbsorptionModel, CWDriveSpec, net_cooling_map

deltas = np.linspace(-5, 5, 21)
omegas = np.linspace(0.1, 2.0, 8)
res = net_cooling_map(deltas, omegas, CWDriveSpec(0.0, 0.0), AbsorptionModel())

# %% [markdown]
# Net cooling (marked ``+``) shows up on the red side, Delta > 0, at weak
# drive: there the upper dressed state is mostly |1>, spontaneous emission
# refills |->, and phonon absorption dominates.

# %%
net = res["net_cooling"].reshape(len(deltas), len(omegas))
print("Omega ->  " + " ".join(f"{o:4.2f}" for o in omegas))
for d, row in zip(deltas, net):
    print(f"Delta={d:+5.1f} " + "    ".join("+" if x else "." for x in row))
print(f"largest net cooling {res['net_W'].max():.3e} W per emitter")
