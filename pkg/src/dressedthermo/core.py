"""Two-level emitter in the rotating frame: drive parameters, dressed states
and scalar thermodynamic functions of the state.

Units: hbar = 1 and frequencies in ps^-1 throughout. Temperatures are kept
as angular rates k_B T / hbar (ps^-1) internally; Kelvin only appears in the
conversion helpers below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

# k_B / hbar in ps^-1 per kelvin
KB_OVER_HBAR = constants.k / constants.hbar * 1e-12
# hbar in meV ps
HBAR_MEV_PS = constants.hbar / constants.e * 1e3 * 1e12

LAMBDA_EPS = 1e-9

SZ = 0.5 * np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
# Hermitian pseudospin; the anti-Hermitian printed variant would not give a
# Hermitian Hamiltonian.
SX = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

INFINITE_TEMPERATURE = float("inf")


@dataclass(frozen=True)
class DriveFrame:
    """Instantaneous detuning and Rabi frequency (ps^-1)."""

    delta: float
    omega: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"Rabi frequency must be non-negative, got {self.omega}")

    def hamiltonian(self) -> np.ndarray:
        return hamiltonian(self.delta, self.omega)


@dataclass(frozen=True)
class DressedFrame:
    lam: float
    theta: float
    minus: np.ndarray
    plus: np.ndarray
    degenerate: bool = False

    @property
    def jump_up(self) -> np.ndarray:
        """|+><-|, zero for a degenerate frame."""
        if self.degenerate:
            return np.zeros((2, 2), dtype=complex)
        return np.outer(self.plus, self.minus.conj())

    @property
    def jump_down(self) -> np.ndarray:
        if self.degenerate:
            return np.zeros((2, 2), dtype=complex)
        return np.outer(self.minus, self.plus.conj())

    @property
    def basis(self) -> np.ndarray:
        """Unitary with columns (|->, |+>)."""
        return np.column_stack([self.minus, self.plus])

    def populations(self, rho: np.ndarray) -> tuple[float, float]:
        """Dressed populations (p_plus, p_minus) of ``rho``."""
        p_plus = np.real(self.plus.conj() @ rho @ self.plus)
        p_minus = np.real(self.minus.conj() @ rho @ self.minus)
        return float(p_plus), float(p_minus)


def hamiltonian(delta, omega) -> np.ndarray:
    """H_s = delta * s_z - omega * s_x."""
    return delta * SZ - omega * SX


def dressed_splitting(frame: DriveFrame) -> float:
    return float(np.hypot(frame.delta, frame.omega))


def mixing_angle(delta, omega):
    """Angle theta in [0, pi] with delta = L cos(theta), omega = L sin(theta).

    Because omega >= 0 the angle is continuous through the anticrossing, so
    the eigenvector labels never flip along a sweep of delta.
    """
    return np.arctan2(omega, delta)


def dressed_vectors(theta):
    """Return (|->, |+>) components for (arrays of) mixing angles.

    |-> = (cos theta/2, sin theta/2), |+> = (-sin theta/2, cos theta/2) in the
    {|0>, |1>} basis. Real, so a single rotation matrix diagonalizes H_s.
    """
    c = np.cos(0.5 * np.asarray(theta))
    s = np.sin(0.5 * np.asarray(theta))
    minus = np.stack([c, s], axis=-1).astype(complex)
    plus = np.stack([-s, c], axis=-1).astype(complex)
    return minus, plus


def dressed_frame(frame: DriveFrame) -> DressedFrame:
    lam = dressed_splitting(frame)
    theta = float(mixing_angle(frame.delta, frame.omega))
    minus, plus = dressed_vectors(theta)
    return DressedFrame(lam, theta, minus, plus, degenerate=lam < LAMBDA_EPS)


def track_frames(deltas, omegas) -> list[DressedFrame]:
    """Dressed frames along a sweep with eigenvector labels kept continuous.

    Each frame is matched to its predecessor by overlap, which only matters
    when omega touches zero exactly while delta changes sign (there the
    mixing angle jumps and the labels would otherwise flip).
    """
    frames = []
    prev = None
    for d, o in zip(np.asarray(deltas, float), np.asarray(omegas, float)):
        f = dressed_frame(DriveFrame(float(d), float(o)))
        if prev is not None and not f.degenerate:
            keep = abs(prev.minus.conj() @ f.minus)
            swap = abs(prev.minus.conj() @ f.plus)
            if swap > keep:
                f = DressedFrame(f.lam, f.theta, f.plus, f.minus, f.degenerate)
        frames.append(f)
        prev = f
    return frames


def effective_temperature(p_plus, p_minus, lam):
    """Dressed-population temperature in kelvin, signed.

    Solves p_plus / p_minus = exp(-lam / k_B T_eff). Negative values mean
    population inversion; equal populations give ``INFINITE_TEMPERATURE``.
    """
    if p_plus < -1e-12 or p_minus < -1e-12 or p_plus + p_minus > 1 + 1e-9:
        raise ValueError(f"invalid populations ({p_plus}, {p_minus})")
    if p_plus <= 0.0:
        return 0.0
    if p_minus <= 0.0:
        return -0.0
    log_ratio = np.log(p_minus / p_plus)
    if log_ratio == 0.0:
        return INFINITE_TEMPERATURE
    return float(lam / log_ratio / KB_OVER_HBAR)


def von_neumann_entropy(rho) -> float:
    """-Tr rho ln rho in units of k_B (0 ln 0 = 0)."""
    w = np.linalg.eigvalsh(0.5 * (rho + np.conj(np.transpose(rho))))
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def diagonal_entropy(p_plus, p_minus) -> float:
    """Shannon entropy of the dressed populations."""
    p = np.array([p_plus, p_minus], float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def kelvin_to_angular_rate(temperature):
    """k_B T / hbar in ps^-1."""
    if np.any(np.asarray(temperature) < 0):
        raise ValueError("temperature must be non-negative")
    return temperature * KB_OVER_HBAR


def angular_rate_to_kelvin(rate):
    return rate / KB_OVER_HBAR


def check_density_matrix(rho, *, deformed=False, atol=1e-9):
    """Raise ValueError unless ``rho`` is a valid 2x2 density matrix."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12 and not deformed:
        raise ValueError("density matrix is not Hermitian")
    if deformed:
        return rho
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError(f"trace {np.trace(rho)} differs from 1")
    if np.min(np.linalg.eigvalsh(rho)) < -atol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def ground_state() -> np.ndarray:
    """|0><0|."""
    return np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
