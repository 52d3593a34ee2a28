"""
Distribution of the absorbed heat
=================================

Marking each phonon process with a counting field u turns the trace of the
modified state into the characteristic function G(u) of the heat. An FFT of
G sampled on a u grid gives P(Q).
"""

# %%
import math

import numpy as np

from dressedthermo import (BathSpec, ChirpedGaussianSpec, EvolutionSpec, characteristic_scan,
                           default_grid, evolve, heat_distribution)

spec = EvolutionSpec(ChirpedGaussianSpec(0.5, 9 * math.pi, 10.0, 0.0), BathSpec(20.0))
grid = default_grid(spec)
print(f"u step {grid.du:.4f} ps, Q range +-{grid.q_range:.2f} ps^-1, Q step {grid.q_step:.4f} ps^-1")

# %%
dist = heat_distribution(characteristic_scan(spec, grid))
print(f"mean {dist.mean:.5f} ps^-1 (master equation: {evolve(spec).total_heat:.5f})")
print(f"probability of net heat release: {dist.mass_below(0.0):.4f}")

# %% [markdown]
# The distribution is a spike at Q = 0 (no phonon process, broadened by the
# finite u range) plus a continuum from one or more processes at the
# instantaneous splitting.

# %%
coarse = dist.probabilities.reshape(-1, 16).sum(axis=1) * dist.dq
centers = dist.q_values.reshape(-1, 16).mean(axis=1)
for q, p in zip(centers, coarse):
    if p > 2e-3:
        print(f"Q ~ {q:+6.2f}  {'#' * int(200 * p)}")
