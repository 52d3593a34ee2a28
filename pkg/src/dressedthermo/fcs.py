"""Heat distribution P(Q) from the counting-field characteristic function.

G(u) is sampled at u_k = k du, k = -n/2 .. n/2 - 1, and transformed onto the
grid Q_j = j dQ with dQ = 2 pi / (n du). Internally G is the characteristic
function of the bath energy change; the returned distribution uses the
opposite sign, so positive Q is heat taken from the phonons by the emitter.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import HBAR_MEV_PS
from .propagator import EvolutionSpec, evolve_counting_batch
from .pulse import PulseDrive

SIGN_CONVENTION = "phonons->emitter positive"


@dataclass(frozen=True)
class CountingGrid:
    du: float
    n: int = 1024
    window: bool = False

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two, got {self.n}")
        if not self.du > 0:
            raise ValueError("du must be positive")

    @property
    def u(self) -> np.ndarray:
        return self.du * np.arange(-self.n // 2, self.n // 2)

    @property
    def q_step(self) -> float:
        return 2 * np.pi / (self.n * self.du)

    @property
    def q_range(self) -> float:
        return np.pi / self.du

    @property
    def q(self) -> np.ndarray:
        return self.q_step * np.arange(-self.n // 2, self.n // 2)

    def check_resolves(self, lam_max: float):
        if self.n * self.du * lam_max / np.pi < 8:
            raise ValueError(
                f"grid too coarse: Q step {self.q_step:.4g} exceeds lam_max/4 = {lam_max / 4:.4g}")
        if self.q_range < lam_max:
            raise ValueError(f"Q range {self.q_range:.4g} smaller than lam_max = {lam_max:.4g}")


def default_grid(spec: EvolutionSpec, n: int = 1024, range_factor: float = 10.0) -> CountingGrid:
    """Q range of +-range_factor * Lambda_max, n samples."""
    lam_max = PulseDrive(spec.pulse).max_splitting(*spec.span)
    return CountingGrid(du=np.pi / (range_factor * lam_max), n=n)


@dataclass
class CharacteristicScan:
    grid: CountingGrid
    G: np.ndarray
    t: float | None = None

    @property
    def u(self):
        return self.grid.u


@dataclass
class HeatDistribution:
    q_values: np.ndarray
    probabilities: np.ndarray
    grid: CountingGrid
    sign_convention: str = SIGN_CONVENTION
    aliased: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def dq(self) -> float:
        return self.grid.q_step

    @property
    def mean(self) -> float:
        return moments(self)[0]

    @property
    def variance(self) -> float:
        return moments(self)[1]

    def mass_below(self, q0: float = 0.0, inclusive_zero_bin: bool = False) -> float:
        """Probability of Q < q0 (the bin at q0 excluded unless asked)."""
        sel = self.q_values <= q0 if inclusive_zero_bin else self.q_values < q0 - 0.5 * self.dq
        return float(np.sum(self.probabilities[sel]) * self.dq)

    def in_mev(self):
        return self.q_values * HBAR_MEV_PS


def characteristic_scan(spec: EvolutionSpec, grid: CountingGrid | None = None, *,
                        rho0=None, t=None, chunk: int = 1024) -> CharacteristicScan | list:
    """Sample G(u) on the grid at the end of the window (or at times ``t``)."""
    grid = default_grid(spec) if grid is None else grid
    grid.check_resolves(PulseDrive(spec.pulse).max_splitting(*spec.span))
    u = grid.u
    parts = []
    for i in range(0, len(u), chunk):
        try:
            parts.append(evolve_counting_batch(spec, u[i:i + chunk], rho0,
                                               t_eval=None if t is None else t))
        except Exception as exc:
            raise RuntimeError(f"counting evolution failed for u in "
                               f"[{u[i]:.4g}, {u[min(i + chunk, len(u)) - 1]:.4g}]") from exc
    G = np.concatenate(parts, axis=-1)
    if t is None:
        return CharacteristicScan(grid, G)
    return [CharacteristicScan(grid, g, float(tt)) for tt, g in zip(np.atleast_1d(t), G)]


def heat_distribution(scan: CharacteristicScan, *, norm_tol: float = 1e-3,
                      edge_fraction: float = 0.05) -> HeatDistribution:
    """Inverse-transform G(u) into a density over Q (per ps^-1)."""
    grid = scan.grid
    G = np.asarray(scan.G, dtype=complex)
    if grid.window:
        # Gaussian apodization, exp(-8) at the edge of the u range; a symmetric
        # smoothing in Q that keeps normalization and mean
        G = G * np.exp(-8.0 * (grid.u / (0.5 * grid.n * grid.du)) ** 2)
    # the k = -n/2 sample has no +n/2 partner; keep its Hermitian part
    G = G.copy()
    G[0] = G[0].real
    # G is the characteristic function of the bath energy change x = -Q, so
    # (1/2pi) sum_k G(u_k) exp(+i u_k Q) du is already the density of Q.
    P = grid.n * np.fft.ifft(np.fft.ifftshift(G)) * grid.du / (2 * np.pi)
    P = np.fft.fftshift(P)
    if np.max(np.abs(P.imag)) * grid.q_step > 1e-6:
        warnings.warn(f"imaginary part of P(Q) up to {np.max(np.abs(P.imag)):.3g}; "
                      "G(u) lacks Hermitian symmetry", RuntimeWarning)
    P = P.real
    dq = grid.q_step
    mass = np.sum(P) * dq
    n_edge = max(1, int(edge_fraction * grid.n))
    edge_mass = (np.sum(np.abs(P[:n_edge])) + np.sum(np.abs(P[-n_edge:]))) * dq
    aliased = abs(mass - 1) > norm_tol or edge_mass > norm_tol
    if aliased:
        warnings.warn(f"heat distribution normalization {mass:.6f}, edge mass "
                      f"{edge_mass:.2e}: Q range too small", RuntimeWarning)
    return HeatDistribution(grid.q, P, grid, aliased=aliased,
                            meta={"normalization": float(mass), "edge_mass": float(edge_mass)})


def moments(dist: HeatDistribution) -> tuple[float, float]:
    """Mean and variance by quadrature on the Q grid."""
    q, p, dq = dist.q_values, dist.probabilities, dist.dq
    norm = np.sum(p) * dq
    mean = np.sum(q * p) * dq / norm
    var = np.sum((q - mean) ** 2 * p) * dq / norm
    return float(mean), float(var)


def mean_from_derivative(spec: EvolutionSpec, h: float = 1e-3, rho0=None) -> float:
    """<Q> from a central difference of G at u = 0 (phonons->emitter sign).

    Independent of the transform: only G(+h) and G(-h) are evaluated.
    """
    Gp, Gm = evolve_counting_batch(spec, [h, -h], rho0)
    # G(u) = <exp(-i u Q)>, so dG/du = -i <Q>
    return float(np.real(1j * (Gp - Gm) / (2 * h)))


def heat_pipeline(spec: EvolutionSpec, grid: CountingGrid | None = None, rho0=None) -> HeatDistribution:
    grid = default_grid(spec) if grid is None else grid
    return heat_distribution(characteristic_scan(spec, grid, rho0=rho0))
