"""Acoustic-phonon bath: spectral densities, Bose occupation and the
dressed-state absorption/emission rates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import LAMBDA_EPS, DriveFrame, kelvin_to_angular_rate

ENERGY_EPS = 1e-9

FORMS = ("super_ohmic_gaussian_cutoff", "super_ohmic_exponential_cutoff")


@dataclass(frozen=True)
class SpectralDensity:
    """J(w) = A w^3 f(w / w_c), A in ps^2 and w_c in ps^-1."""

    form: str = "super_ohmic_gaussian_cutoff"
    amplitude: float = 0.027
    cutoff: float = 2.2

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown spectral density form {self.form!r}; expected one of {FORMS}")
        if self.amplitude < 0 or self.cutoff <= 0:
            raise ValueError("amplitude must be >= 0 and cutoff > 0")

    def __call__(self, w):
        return spectral_density_at(self, w)


# Quantum-dot exciton defaults (InGaAs deformation-potential coupling).
EXCITON_J = SpectralDensity("super_ohmic_gaussian_cutoff", 0.027, 2.2)
# SiV-like defaults.
SIV_J = SpectralDensity("super_ohmic_exponential_cutoff", 0.005, 5.0)


@dataclass(frozen=True)
class BathSpec:
    temperature: float = 20.0  # K
    spectral_density: SpectralDensity = field(default_factory=lambda: EXCITON_J)

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0 K, got {self.temperature}")

    @property
    def kT(self) -> float:
        """k_B T / hbar in ps^-1."""
        return float(kelvin_to_angular_rate(self.temperature))


def spectral_density_at(J: SpectralDensity, w):
    w = np.asarray(w, float)
    if np.any(w < 0):
        raise ValueError("spectral density is defined for w >= 0")
    x = w / J.cutoff
    if J.form == "super_ohmic_gaussian_cutoff":
        return J.amplitude * w**3 * np.exp(-x * x)
    return J.amplitude * w**3 * np.exp(-x)


def bose_occupation(energy, bath: BathSpec):
    """n_B(E) = 1 / (exp(E / k_B T) - 1); identically 0 at T = 0."""
    energy = np.asarray(energy, float)
    kT = bath.kT
    if kT == 0.0:
        return np.zeros_like(energy)[()]
    if np.any(energy <= ENERGY_EPS):
        raise ValueError("Bose occupation diverges for energy <= 0 at T > 0")
    return 1.0 / np.expm1(energy / kT)


def rates_from(delta, omega, J: SpectralDensity, kT: float):
    """Vectorized (gamma_a, gamma_e) for arrays of detuning and Rabi frequency.

    gamma_a = pi Omega^2 n_B(L) J(L) / (2 L^2), gamma_e the same with n_B + 1.
    Both vanish below the degeneracy threshold (J ~ L^3 makes this the limit).
    """
    delta = np.asarray(delta, float)
    omega = np.asarray(omega, float)
    lam = np.hypot(delta, omega)
    ok = lam >= LAMBDA_EPS
    lam_safe = np.where(ok, lam, 1.0)
    x = lam_safe / J.cutoff
    cut = np.exp(-x * x) if J.form == "super_ohmic_gaussian_cutoff" else np.exp(-x)
    # J(L) / L^2 = A L cut, avoids dividing by L^2
    base = np.where(ok, 0.5 * np.pi * omega**2 * J.amplitude * lam_safe * cut, 0.0)
    if kT == 0.0:
        n = np.zeros_like(lam_safe)
    else:
        n = 1.0 / np.expm1(lam_safe / kT)
    return base * n, base * (n + 1.0)


def phonon_rates(frame: DriveFrame, bath: BathSpec) -> tuple[float, float]:
    ga, ge = rates_from(frame.delta, frame.omega, bath.spectral_density, bath.kT)
    return float(ga), float(ge)
