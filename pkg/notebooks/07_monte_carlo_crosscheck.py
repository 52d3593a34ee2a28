"""
Quantum jumps as an independent check
=====================================

Each trajectory evolves under the no-jump Hamiltonian and jumps between
dressed states at random times, recording +Lambda for an absorption and
-Lambda for an emission. The ensemble of recorded heats must reproduce the
distribution obtained from the characteristic function.
"""

# %%
import math

from dressedthermo import (BathSpec, ChirpedGaussianSpec, EvolutionSpec, characteristic_scan,
                           evolve, heat_distribution, sample_trajectories, total_variation)

spec = EvolutionSpec(ChirpedGaussianSpec(1.0, 4 * math.pi, 5.0, 1.0), BathSpec(20.0))
stats = sample_trajectories(spec, 20_000, seed=7)
dist = heat_distribution(characteristic_scan(spec))
traj = evolve(spec)

# %%
print(f"jump ensemble: {stats.mean:.4f} +- {stats.stderr:.4f} ps^-1")
print(f"master equation: {traj.total_heat:.4f} ps^-1, transformed P(Q): {dist.mean:.4f} ps^-1")
print(f"total-variation distance of the histograms: {total_variation(stats, dist):.4f}")
print("ensemble state at the end:\n", stats.final_rho().round(4))
print("master-equation state:\n", traj.final_rho.round(4))
