"""
Efficiency of a pulse-driven heat engine
========================================

The pulse is the hot stroke: the emitter takes heat Q_h from phonons at T_h
and its entropy changes by dS. A reversible stroke at T_c closes the cycle
and dumps T_c dS, so the work extracted per cycle is Q_h - T_c dS.
"""

# %%
import math

from dressedthermo import (BathSpec, ChirpedGaussianSpec, EngineSpec, EvolutionSpec,
                           NotHeatAbsorbingError, engine_efficiency, evolve)

engine = EngineSpec(hot_T=20.0, cold_T=2.7)
print(f"Carnot efficiency {engine.carnot:.3f}")

# %%
pulses = {
    "chirped   (0.5 ps, 9 pi, a=10 ps^2)": ChirpedGaussianSpec(0.5, 9 * math.pi, 10.0, 2.5),
    "unchirped (2 ps, 6 pi)": ChirpedGaussianSpec(2.0, 6 * math.pi, 0.0, 2.5),
    "unchirped on resonance": ChirpedGaussianSpec(2.0, 6 * math.pi, 0.0, 0.0),
}
for name, pulse in pulses.items():
    traj = evolve(EvolutionSpec(pulse, BathSpec(engine.hot_T)))
    try:
        eta, ratio = engine_efficiency(traj, engine)
        print(f"{name}: Q_h = {traj.total_heat:.4f} ps^-1, eta/eta_C = {ratio:.3f}")
    except NotHeatAbsorbingError as exc:
        print(f"{name}: {exc}")
