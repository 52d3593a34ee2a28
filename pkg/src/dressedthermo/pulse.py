"""Linearly chirped Gaussian pulses.

A bandwidth-limited Gaussian of duration ``tau0`` and area ``theta0`` is
given the spectral phase ``a (w - w0)^2 / 2``. The result is again Gaussian,
stretched to ``tau`` and with a linear frequency sweep of rate ``alpha``::

    tau   = sqrt(tau0^2 + a^2 / tau0^2)
    alpha = a / (tau0^4 + a^2)
    Omega(t) = theta0 / sqrt(2 pi tau0 tau) * exp(-(t - tc)^2 / (2 tau^2))
    Delta(t) = delta - alpha (t - tc)

``synthesize_spectrally`` builds the same pulse numerically with an FFT and
is used to check these closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .core import DriveFrame, mixing_angle


@dataclass(frozen=True)
class ChirpedGaussianSpec:
    tau0: float
    theta0: float
    chirp_a: float = 0.0
    delta0: float = 0.0
    t_center: float = 0.0

    def __post_init__(self):
        if not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0}")
        if self.theta0 < 0:
            raise ValueError(f"theta0 must be non-negative, got {self.theta0}")

    def params(self) -> "ChirpedPulseParams":
        return chirp_transform(self)

    def window(self, half_widths: float = 6.0) -> tuple[float, float]:
        """Default integration window, +-6 tau around the pulse center."""
        tau = self.params().tau
        return self.t_center - half_widths * tau, self.t_center + half_widths * tau

    def frame(self, t: float) -> DriveFrame:
        return DriveFrame(float(detuning_at(self, t)), float(rabi_at(self, t)))


@dataclass(frozen=True)
class ChirpedPulseParams:
    tau: float
    alpha: float
    peak_rabi: float


def chirp_transform(spec: ChirpedGaussianSpec) -> ChirpedPulseParams:
    t0, a = spec.tau0, spec.chirp_a
    tau = np.sqrt(t0**2 + a**2 / t0**2)
    alpha = a / (t0**4 + a**2)
    peak = spec.theta0 / np.sqrt(2 * np.pi * t0 * tau)
    return ChirpedPulseParams(float(tau), float(alpha), float(peak))


def rabi_at(spec: ChirpedGaussianSpec, t):
    p = chirp_transform(spec)
    x = (np.asarray(t, float) - spec.t_center) / p.tau
    return p.peak_rabi * np.exp(-0.5 * x * x)


def detuning_at(spec: ChirpedGaussianSpec, t):
    p = chirp_transform(spec)
    return spec.delta0 - p.alpha * (np.asarray(t, float) - spec.t_center)


def splitting_at(spec: ChirpedGaussianSpec, t):
    return np.hypot(detuning_at(spec, t), rabi_at(spec, t))


class PulseDrive:
    """Fast evaluator of (Delta, Omega, Lambda, theta) at arbitrary times.

    Caches the closed-form parameters so the integrators do not rebuild them
    at every stage.
    """

    def __init__(self, spec: ChirpedGaussianSpec):
        self.spec = spec
        p = chirp_transform(spec)
        self.tau, self.alpha, self.peak = p.tau, p.alpha, p.peak_rabi
        self.tc, self.delta0 = spec.t_center, spec.delta0

    def __call__(self, t):
        x = (t - self.tc) / self.tau
        if isinstance(t, float):
            omega = self.peak * math.exp(-0.5 * x * x)
        else:
            omega = self.peak * np.exp(-0.5 * x * x)
        delta = self.delta0 - self.alpha * (t - self.tc)
        return delta, omega

    def max_splitting(self, t_start, t_end, n=4001) -> float:
        t = np.linspace(t_start, t_end, n)
        d, o = self(t)
        return float(np.max(np.hypot(d, o)))


def pulse_table(spec: ChirpedGaussianSpec, t) -> dict[str, np.ndarray]:
    """Columns of the pulse preview: Omega, Delta, Lambda and theta vs time."""
    t = np.asarray(t, float)
    omega = rabi_at(spec, t)
    delta = detuning_at(spec, t)
    lam = np.hypot(delta, omega)
    return {
        "t_ps": t,
        "omega_ps_inv": omega,
        "delta_ps_inv": delta,
        "lambda_ps_inv": lam,
        "theta_rad": mixing_angle(delta, omega),
    }


def synthesize_spectrally(spec: ChirpedGaussianSpec, n_samples: int = 1 << 14,
                          time_window: float | None = None):
    """Chirp the bandwidth-limited pulse numerically.

    Returns ``(t, envelope)`` where ``envelope`` is the complex Rabi envelope
    of the field ``envelope(t) exp(-i w0 t)``. Its modulus is Omega(t) and the
    laser frequency is ``w0 - d arg(envelope)/dt``.
    """
    if n_samples < 1024 or n_samples & (n_samples - 1):
        raise ValueError("n_samples must be a power of two >= 1024")
    tau = chirp_transform(spec).tau
    if time_window is None:
        time_window = 16.0 * tau
    if time_window < 8.0 * tau:
        raise ValueError(
            f"time window {time_window:g} ps < 8 tau = {8 * tau:g} ps would alias")
    dt = time_window / n_samples
    t = spec.t_center + (np.arange(n_samples) - n_samples // 2) * dt
    x = (t - spec.t_center) / spec.tau0
    field0 = spec.theta0 / (np.sqrt(2 * np.pi) * spec.tau0) * np.exp(-0.5 * x * x)
    w = 2 * np.pi * np.fft.fftfreq(n_samples, dt)
    spectrum = np.fft.fft(field0) * np.exp(0.5j * spec.chirp_a * w**2)
    return t, np.fft.ifft(spectrum)
