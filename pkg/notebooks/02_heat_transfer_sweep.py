"""
Heat taken from the phonons by one pulse
========================================

Phonons drive transitions between the dressed states. Absorption |-> -> |+>
takes an energy Lambda from the lattice, emission gives it back. Whether a
pulse cools the lattice depends on how the dressed populations compare with
their thermal ratio while the pulse is on.
"""

# %%
import math

import numpy as np

from dressedthermo import BathSpec, ChirpedGaussianSpec, EvolutionSpec, evolve, integrated_heat

bath = BathSpec(temperature=20.0)

# %% [markdown]
# On resonance the sign of the heat follows the sign of the chirp. A small
# grid is enough to see it; the CLI command ``heat-sweep`` produces the full
# surface.

# %%
chirps = np.linspace(-20, 20, 5)
areas = math.pi * np.array([2.0, 6.0, 10.0])
for delta in (0.0, -2.5, 2.5):
    print(f"detuning {delta:+.1f} ps^-1")
    for a in chirps:
        q = [integrated_heat(evolve(EvolutionSpec(ChirpedGaussianSpec(2.0, th, a, delta), bath)))
             for th in areas]
        print("  a={:6.1f}  ".format(a) + "  ".join(f"{x:+.4f}" for x in q))

# %% [markdown]
# The accumulated heat is integrated together with the state, so the
# trajectory also carries the instantaneous current.

# %%
traj = evolve(EvolutionSpec(ChirpedGaussianSpec(2.0, 6 * math.pi, 10.0), bath))
i = np.argmax(traj.heat_current)
print(f"peak current {traj.heat_current[i]:.4f} ps^-2 at t = {traj.t[i]:.2f} ps; total {traj.total_heat:.4f} ps^-1")
