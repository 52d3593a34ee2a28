"""Continuous-wave driving with spontaneous emission: steady state, phonon
cooling power and the competing laser-absorption heating."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .bath import SIV_J, BathSpec, rates_from
from .core import LAMBDA_EPS, dressed_vectors, hamiltonian, mixing_angle
from .propagator import ConstantDrive, Generator

# ps^-2 (hbar = 1) to watts
PS2_TO_W = constants.hbar * 1e24
DEBYE = 1e-21 / constants.c  # C m
GAMMA_SP_DEFAULT = 1e-3  # ps^-1 (1 ns^-1)


class NoUniqueSteadyStateError(ValueError):
    pass


@dataclass(frozen=True)
class CWDriveSpec:
    delta: float
    omega: float
    bath: BathSpec = field(default_factory=lambda: BathSpec(20.0, SIV_J))
    gamma_sp: float = GAMMA_SP_DEFAULT

    def __post_init__(self):
        if self.gamma_sp < 0:
            raise ValueError("gamma_sp must be non-negative")
        if self.omega < 0:
            raise ValueError("Rabi frequency must be non-negative")

    def rates(self) -> tuple[float, float]:
        ga, ge = rates_from(self.delta, self.omega, self.bath.spectral_density, self.bath.kT)
        return float(ga), float(ge)


@dataclass(frozen=True)
class AbsorptionModel:
    dipole: float = 14.3  # Debye
    density_over_absorption: float = 1.47e22  # emitter density / absorption coefficient, m^-2
    refractive_index: float = 2.4  # diamond

    def __post_init__(self):
        if min(self.dipole, self.density_over_absorption, self.refractive_index) <= 0:
            raise ValueError("absorption model parameters must be positive")


def _dissipator_super(O: np.ndarray, rate: float) -> np.ndarray:
    """rate * (O rho O' - {O'O, rho}/2) acting on row-major vec(rho)."""
    I = np.eye(2)
    OdO = O.conj().T @ O
    return rate * (np.kron(O, O.conj()) - 0.5 * np.kron(OdO, I) - 0.5 * np.kron(I, OdO.T))


def liouvillian(spec: CWDriveSpec) -> np.ndarray:
    """4x4 generator on row-major vec(rho) = (r00, r01, r10, r11)."""
    H = hamiltonian(spec.delta, spec.omega)
    I = np.eye(2)
    L = -1j * (np.kron(H, I) - np.kron(I, H.T))
    lam = np.hypot(spec.delta, spec.omega)
    if lam >= LAMBDA_EPS:
        ga, ge = spec.rates()
        minus, plus = dressed_vectors(mixing_angle(spec.delta, spec.omega))
        up = np.outer(plus, minus.conj())
        L = L + _dissipator_super(up, ga) + _dissipator_super(up.conj().T, ge)
    sigma = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
    return L + _dissipator_super(sigma, spec.gamma_sp)


# vec(rho) = M @ (r00, Re r01, Im r01, r11) for Hermitian rho
_M = np.array([[1, 0, 0, 0], [0, 1, 1j, 0], [0, 1, -1j, 0], [0, 0, 0, 1]], dtype=complex)
_M_INV = np.linalg.inv(_M)


def real_liouvillian(spec: CWDriveSpec) -> np.ndarray:
    """The generator on the real Hermitian parameters (r00, Re r01, Im r01, r11)."""
    Lr = _M_INV @ liouvillian(spec) @ _M
    return Lr.real


def steady_state(spec: CWDriveSpec, *, rank_tol: float = 1e-12) -> np.ndarray:
    Lr = real_liouvillian(spec)
    sv = np.linalg.svd(Lr, compute_uv=False)
    if sv[-2] <= rank_tol * max(sv[0], 1.0):
        raise NoUniqueSteadyStateError(
            f"no unique steady state (delta={spec.delta}, omega={spec.omega}, "
            f"gamma_sp={spec.gamma_sp}): null space has dimension > 1")
    A = np.vstack([Lr, [1.0, 0.0, 0.0, 1.0]])
    b = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    rho = (_M @ x).reshape(2, 2)
    return 0.5 * (rho + rho.conj().T)


def steady_residual(spec: CWDriveSpec, rho: np.ndarray) -> float:
    return float(np.linalg.norm(liouvillian(spec) @ rho.ravel()))


def dressed_populations(spec: CWDriveSpec, rho: np.ndarray) -> tuple[float, float]:
    minus, plus = dressed_vectors(mixing_angle(spec.delta, spec.omega))
    return (float(np.real(plus.conj() @ rho @ plus)), float(np.real(minus.conj() @ rho @ minus)))


def cooling_power(spec: CWDriveSpec, rho: np.ndarray | None = None) -> float:
    """Steady heat current from the phonons, ps^-2 (multiply by PS2_TO_W for W)."""
    lam = float(np.hypot(spec.delta, spec.omega))
    if lam < LAMBDA_EPS:
        return 0.0
    rho = steady_state(spec) if rho is None else rho
    p_plus, p_minus = dressed_populations(spec, rho)
    ga, ge = spec.rates()
    return lam * (ga * p_minus - ge * p_plus)


def absorption_heating(omega, model: AbsorptionModel):
    """Laser power absorbed by the host per emitter, in watts.

    The field amplitude follows from Omega = d E / hbar, the intensity is
    c eps0 n E^2 / 2, and each emitter is charged alpha / rho of it.
    """
    omega_si = np.asarray(omega, float) * 1e12
    d = model.dipole * DEBYE
    intensity = (constants.c * constants.epsilon_0 * model.refractive_index
                 * constants.hbar**2 * omega_si**2 / (2 * d**2))
    return intensity / model.density_over_absorption


def net_cooling_map(deltas, omegas, template: CWDriveSpec | None = None,
                    model: AbsorptionModel | None = None) -> dict[str, np.ndarray]:
    """Cooling, heating and net power (W) on the (delta, omega) grid.

    Rows are ordered delta-major. ``net_cooling`` flags net > 0.
    """
    template = CWDriveSpec(0.0, 0.0) if template is None else template
    model = AbsorptionModel() if model is None else model
    D, O = np.meshgrid(np.asarray(deltas, float), np.asarray(omegas, float), indexing="ij")
    D, O = D.ravel(), O.ravel()
    cool = np.empty_like(D)
    residual = np.empty_like(D)
    for i, (d, o) in enumerate(zip(D, O)):
        spec = CWDriveSpec(d, o, template.bath, template.gamma_sp)
        rho = steady_state(spec)
        residual[i] = steady_residual(spec, rho)
        cool[i] = cooling_power(spec, rho) * PS2_TO_W
    heat = absorption_heating(O, model)
    net = cool - heat
    return {"delta_ps_inv": D, "omega_ps_inv": O, "cooling_W": cool, "heating_W": heat,
            "net_W": net, "net_cooling": net > 0, "residual": residual}


def relax_to_steady(spec: CWDriveSpec, rho0: np.ndarray | None = None, duration: float | None = None,
                    rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """Long-time integration of the same dynamics (independent check)."""
    from .integrate import solve
    gen = Generator(ConstantDrive(spec.delta, spec.omega), spec.bath, spec.gamma_sp)
    ga, ge = spec.rates()
    slowest = min(r for r in (ga + ge, spec.gamma_sp, 1.0) if r > 0)
    duration = 50.0 / slowest if duration is None else duration
    rho0 = np.diag([1.0, 0.0]).astype(complex) if rho0 is None else rho0

    def rhs(t, y):
        d00, d01, d10, d11, _ = gen.derivative(t, y[0], y[1], y[2], y[3])
        return np.array([d00, d01, d10, d11])

    sol = solve(rhs, (0.0, duration), rho0.ravel(), t_eval=[duration], rtol=rtol, atol=atol)
    return sol.y[-1].reshape(2, 2)
