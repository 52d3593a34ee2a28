"""
Chirped pulses and dressed states
=================================

A linearly chirped Gaussian pulse sweeps the laser frequency through the
emitter resonance. In the frame rotating with the laser the emitter sees a
time-dependent detuning Delta(t) and Rabi frequency Omega(t); its eigenstates
|+>, |-> are split by Lambda = sqrt(Delta^2 + Omega^2).
"""

# %%
import math

import numpy as np

from dressedthermo import ChirpedGaussianSpec, chirp_transform, pulse_table, synthesize_spectrally

# %% [markdown]
# Chirping stretches the pulse from tau0 to tau and adds a frequency sweep of
# rate alpha. The pulse area grows as sqrt(tau / tau0) while the energy stays
# fixed.

# %%
pulse = ChirpedGaussianSpec(tau0=2.0, theta0=6 * math.pi, chirp_a=20.0)
p = chirp_transform(pulse)
print(f"tau = {p.tau:.4f} ps, alpha = {p.alpha:.5f} ps^-2, peak Rabi = {p.peak_rabi:.4f} ps^-1")

# %% [markdown]
# The closed forms can be checked against a numerical construction: take the
# unchirped Gaussian, apply the quadratic spectral phase with an FFT and look
# at the result.

# %%
t, envelope = synthesize_spectrally(pulse)
width = math.sqrt(np.sum(t**2 * np.abs(envelope)) / np.sum(np.abs(envelope)))
print(f"duration from the synthesized envelope: {width:.4f} ps")

# %% [markdown]
# The dressed splitting has its minimum where the sweep crosses resonance.
# For positive chirp the early detuning is positive, so |0> starts out as the
# lower dressed state and follows it adiabatically into |1>.

# %%
tab = pulse_table(pulse, np.linspace(-4 * p.tau, 4 * p.tau, 9))
for row in zip(*(tab[k] for k in ("t_ps", "omega_ps_inv", "delta_ps_inv", "lambda_ps_inv"))):
    print("t={:7.2f}  Omega={:6.3f}  Delta={:6.3f}  Lambda/2={:6.3f}".format(row[0], row[1], row[2], row[3] / 2))
