"""Master-equation dynamics of the pulse-driven emitter.

The state is propagated in the bare {|0>, |1>} basis. Phonon processes act
between the instantaneous dressed states: absorption |-> -> |+> at rate
gamma_a, emission |+> -> |-> at rate gamma_e. With the dissipator
``L(O) rho = O'O rho + rho O'O - 2 O rho O'`` the generator is::

    d rho/dt = -i [H, rho] - (gamma_a / 2) L(|+><-|) rho - (gamma_e / 2) L(|-><+|) rho

so gamma_a and gamma_e are the actual transition rates and the mean heat
current is Lambda (gamma_a p_- - gamma_e p_+).

The counting-field version multiplies the sandwich term of the absorption
channel by exp(-i u Lambda) and that of the emission channel by
exp(+i u Lambda); G(u) = Tr rho_u is then the characteristic function of the
bath energy change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import BathSpec, rates_from
from .core import (LAMBDA_EPS, angular_rate_to_kelvin, effective_temperature,
                   ground_state, hamiltonian, diagonal_entropy, von_neumann_entropy)
from .integrate import IntegrationError, solve
from .pulse import ChirpedGaussianSpec, PulseDrive

__all__ = [
    "EvolutionSpec", "TrajectoryRecord", "IntegrationError",
    "lindblad_dissipator", "lindblad_rhs", "counting_rhs", "evolve",
    "evolve_counting", "Generator",
]


@dataclass(frozen=True)
class EvolutionSpec:
    pulse: ChirpedGaussianSpec
    bath: BathSpec = field(default_factory=BathSpec)
    t_start: float | None = None
    t_end: float | None = None
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float | None = None
    n_samples: int = 1201

    def __post_init__(self):
        t0, t1 = self.span
        if not t0 < t1:
            raise ValueError(f"t_start ({t0}) must precede t_end ({t1})")
        for name in ("rtol", "atol"):
            tol = getattr(self, name)
            if not 0 < tol <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2], got {tol}")

    @property
    def span(self) -> tuple[float, float]:
        w0, w1 = self.pulse.window()
        return (w0 if self.t_start is None else self.t_start,
                w1 if self.t_end is None else self.t_end)

    @property
    def step_cap(self) -> float:
        if self.max_step is not None:
            return self.max_step
        return self.pulse.params().tau / 100.0

    def sample_times(self) -> np.ndarray:
        return np.linspace(*self.span, self.n_samples)

    def with_tolerances(self, rtol, atol) -> "EvolutionSpec":
        return EvolutionSpec(self.pulse, self.bath, self.t_start, self.t_end,
                             rtol, atol, self.max_step, self.n_samples)


class ConstantDrive:
    """Continuous-wave drive with fixed detuning and Rabi frequency."""

    def __init__(self, delta: float, omega: float):
        if omega < 0:
            raise ValueError("Rabi frequency must be non-negative")
        self.delta, self.omega = float(delta), float(omega)

    def __call__(self, t):
        z = np.zeros_like(np.asarray(t, float))
        return self.delta + z, self.omega + z


class Generator:
    """Instantaneous coefficients of the master equation.

    ``drive`` is a pulse spec or any callable ``t -> (delta, omega)``.
    """

    def __init__(self, drive, bath: BathSpec, gamma_sp: float = 0.0):
        self.drive = PulseDrive(drive) if isinstance(drive, ChirpedGaussianSpec) else drive
        self.J = bath.spectral_density
        self.kT = bath.kT
        self.gamma_sp = gamma_sp
        gauss = self.J.form == "super_ohmic_gaussian_cutoff"
        self._cut = (lambda x: math.exp(-x * x)) if gauss else (lambda x: math.exp(-x))

    def coefficients(self, t: float):
        """(delta, omega, lam, cos(theta/2), sin(theta/2), gamma_a, gamma_e)."""
        d, o = self.drive(t)
        d, o = float(d), float(o)
        lam = math.hypot(d, o)
        if lam < LAMBDA_EPS:
            return d, o, lam, 1.0, 0.0, 0.0, 0.0
        half = 0.5 * math.atan2(o, d)
        base = 0.5 * math.pi * o * o * self.J.amplitude * lam * self._cut(lam / self.J.cutoff)
        if self.kT == 0.0:
            n = 0.0
        else:
            x = lam / self.kT
            n = 1.0 / math.expm1(x) if x < 700 else 0.0
        return d, o, lam, math.cos(half), math.sin(half), base * n, base * (n + 1.0)

    def derivative(self, t, r00, r01, r10, r11, u=None):
        """Entries of d rho/dt (or d rho_u/dt when ``u`` is given).

        Entries may be arrays (a batch over u); the returned tuple also
        carries the instantaneous heat current Lambda (gamma_a p_- - gamma_e p_+).
        """
        d, o, lam, c, s, ga, ge = self.coefficients(t)
        hz, hx = -0.5 * d, -0.5 * o
        # -i [H, rho] with H = [[hz, hx], [hx, -hz]]
        x = r10 - r01
        c00 = -1j * hx * x
        c01 = -1j * (2 * hz * r01 + hx * (r11 - r00))
        c10 = -1j * (-2 * hz * r10 + hx * (r00 - r11))
        c11 = 1j * hx * x
        # to the dressed basis (|->, |+>)
        cc, ss, cs = c * c, s * s, c * s
        off = r01 + r10
        R00 = cc * r00 + cs * off + ss * r11
        R11 = ss * r00 - cs * off + cc * r11
        R01 = -cs * r00 + cc * r01 - ss * r10 + cs * r11
        R10 = -cs * r00 - ss * r01 + cc * r10 + cs * r11
        if u is None:
            gain_up, gain_down = ga * R00, ge * R11
        else:
            phase = np.exp(-1j * u * lam)
            gain_up, gain_down = ga * phase * R00, ge * np.conj(phase) * R11
        g = 0.5 * (ga + ge)
        D00 = -ga * R00 + gain_down
        D11 = gain_up - ge * R11
        D01 = -g * R01
        D10 = -g * R10
        Doff = D01 + D10
        d00 = c00 + cc * D00 - cs * Doff + ss * D11
        d01 = c01 + cs * D00 + cc * D01 - ss * D10 - cs * D11
        d10 = c10 + cs * D00 - ss * D01 + cc * D10 - cs * D11
        d11 = c11 + ss * D00 + cs * Doff + cc * D11
        if self.gamma_sp:
            # spontaneous decay |1> -> |0>
            gs = self.gamma_sp
            d00 = d00 + gs * r11
            d11 = d11 - gs * r11
            d01 = d01 - 0.5 * gs * r01
            d10 = d10 - 0.5 * gs * r10
        current = lam * (ga * R00 - ge * R11)
        return d00, d01, d10, d11, current


def lindblad_dissipator(O: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """L(O) rho = O'O rho + rho O'O - 2 O rho O'."""
    OdO = O.conj().T @ O
    return OdO @ rho + rho @ OdO - 2 * O @ rho @ O.conj().T


def _frame_operators(gen: Generator, t: float):
    d, o, lam, c, s, ga, ge = gen.coefficients(t)
    minus = np.array([c, s], dtype=complex)
    plus = np.array([-s, c], dtype=complex)
    up = np.outer(plus, minus.conj())
    if lam < LAMBDA_EPS:
        up = np.zeros((2, 2), dtype=complex)
    return hamiltonian(d, o), up, up.conj().T, lam, ga, ge


def lindblad_rhs(t: float, rho: np.ndarray, spec: EvolutionSpec) -> np.ndarray:
    """d rho / dt built from explicit operators (reference form)."""
    gen = Generator(spec.pulse, spec.bath)
    H, up, down, lam, ga, ge = _frame_operators(gen, t)
    return (-1j * (H @ rho - rho @ H)
            - 0.5 * ga * lindblad_dissipator(up, rho)
            - 0.5 * ge * lindblad_dissipator(down, rho))


def counting_rhs(t: float, rho_u: np.ndarray, spec: EvolutionSpec, u: float) -> np.ndarray:
    """d rho_u / dt with the phase-marked sandwich terms."""
    gen = Generator(spec.pulse, spec.bath)
    H, up, down, lam, ga, ge = _frame_operators(gen, t)
    if u == 0:
        return lindblad_rhs(t, rho_u, spec)
    out = -1j * (H @ rho_u - rho_u @ H)
    for O, rate, phase in ((up, ga, np.exp(-1j * u * lam)), (down, ge, np.exp(1j * u * lam))):
        OdO = O.conj().T @ O
        out = out - 0.5 * rate * (OdO @ rho_u + rho_u @ OdO - 2 * phase * O @ rho_u @ O.conj().T)
    return out


@dataclass
class TrajectoryRecord:
    """Sampled trajectory of the pulse-driven emitter.

    ``heat_current`` and ``cumulative_heat`` use the phonons -> dot positive
    sign convention; ``t_eff`` is in kelvin, entropies in units of k_B.
    """

    t: np.ndarray
    rho: np.ndarray
    delta: np.ndarray
    omega: np.ndarray
    lam: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    gamma_a: np.ndarray
    gamma_e: np.ndarray
    heat_current: np.ndarray
    cumulative_heat: np.ndarray
    entropy: np.ndarray
    diagonal_entropy: np.ndarray
    t_eff: np.ndarray
    nfev: int = 0

    COLUMNS = ("t_ps", "rho00", "rho01_re", "rho01_im", "rho11", "p_plus", "p_minus",
               "lambda_ps_inv", "omega_ps_inv", "delta_ps_inv", "gamma_a_ps_inv",
               "gamma_e_ps_inv", "heat_current_ps_inv2", "cumulative_heat_ps_inv",
               "entropy_vn", "entropy_diag", "t_eff_K")

    def __len__(self):
        return len(self.t)

    @property
    def total_heat(self) -> float:
        return float(self.cumulative_heat[-1])

    @property
    def final_rho(self) -> np.ndarray:
        return self.rho[-1]

    def rows(self) -> np.ndarray:
        r = self.rho
        return np.column_stack([
            self.t, r[:, 0, 0].real, r[:, 0, 1].real, r[:, 0, 1].imag, r[:, 1, 1].real,
            self.p_plus, self.p_minus, self.lam, self.omega, self.delta,
            self.gamma_a, self.gamma_e, self.heat_current, self.cumulative_heat,
            self.entropy, self.diagonal_entropy, self.t_eff,
        ])


def _record(gen: Generator, spec: EvolutionSpec, t, y, nfev) -> TrajectoryRecord:
    rho = y[:, :4].reshape(-1, 2, 2)
    rho = 0.5 * (rho + np.conj(np.transpose(rho, (0, 2, 1))))
    delta, omega = gen.drive(t)
    ga, ge = rates_from(delta, omega, spec.bath.spectral_density, spec.bath.kT)
    lam = np.hypot(delta, omega)
    theta = np.arctan2(omega, delta)
    c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
    r00, r11 = rho[:, 0, 0].real, rho[:, 1, 1].real
    off = 2 * rho[:, 0, 1].real
    p_minus = c * c * r00 + c * s * off + s * s * r11
    p_plus = s * s * r00 - c * s * off + c * c * r11
    current = lam * (ga * p_minus - ge * p_plus)
    t_eff = np.array([
        effective_temperature(max(pp, 0.0), max(pm, 0.0), lm)
        for pp, pm, lm in zip(p_plus, p_minus, lam)
    ])
    return TrajectoryRecord(
        t=t, rho=rho, delta=delta, omega=omega, lam=lam, p_plus=p_plus,
        p_minus=p_minus, gamma_a=ga, gamma_e=ge, heat_current=current,
        cumulative_heat=y[:, 4].real,
        entropy=np.array([von_neumann_entropy(r) for r in rho]),
        diagonal_entropy=np.array([diagonal_entropy(max(a, 0), max(b, 0))
                                   for a, b in zip(p_plus, p_minus)]),
        t_eff=t_eff, nfev=nfev,
    )


def evolve(spec: EvolutionSpec, rho0: np.ndarray | None = None, *, t_eval=None) -> TrajectoryRecord:
    """Integrate the master equation together with the accumulated heat."""
    rho0 = ground_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    gen = Generator(spec.pulse, spec.bath)

    def rhs(t, y):
        d00, d01, d10, d11, current = gen.derivative(t, y[0], y[1], y[2], y[3])
        return np.array([d00, d01, d10, d11, current])

    y0 = np.concatenate([rho0.ravel(), [0.0]])
    t_eval = spec.sample_times() if t_eval is None else np.asarray(t_eval, float)
    sol = solve(rhs, spec.span, y0, t_eval=t_eval, rtol=spec.rtol, atol=spec.atol,
                max_step=spec.step_cap)
    return _record(gen, spec, sol.t, sol.y, sol.nfev)


def evolve_counting_batch(spec: EvolutionSpec, u, rho0: np.ndarray | None = None, *,
                          t_eval=None) -> np.ndarray:
    """Tr rho_u at the end of the window for every counting field in ``u``.

    All u share one adaptive step sequence; the error norm is the worst over
    the batch. With ``t_eval`` returns G sampled at those times instead,
    shape ``(len(t_eval), len(u))``.
    """
    u = np.atleast_1d(np.asarray(u, float))
    rho0 = ground_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    gen = Generator(spec.pulse, spec.bath)

    def rhs(t, y):
        d00, d01, d10, d11, _ = gen.derivative(t, y[:, 0], y[:, 1], y[:, 2], y[:, 3], u=u)
        return np.stack([d00, d01, d10, d11], axis=-1)

    y0 = np.tile(rho0.ravel(), (len(u), 1))
    t0, t1 = spec.span
    times = np.array([t0, t1]) if t_eval is None else np.asarray(t_eval, float)
    sol = solve(rhs, spec.span, y0, t_eval=times, rtol=spec.rtol, atol=spec.atol,
                max_step=spec.step_cap)
    G = sol.y[..., 0] + sol.y[..., 3]
    return G[-1] if t_eval is None else G


def evolve_counting(spec: EvolutionSpec, rho0: np.ndarray | None = None, u: float = 0.0) -> complex:
    """Characteristic function G(u) = Tr rho_u(t_end)."""
    return complex(evolve_counting_batch(spec, [u], rho0)[0])


def coefficients_array(gen: Generator, t):
    """Vectorized :meth:`Generator.coefficients` for an array of times."""
    t = np.asarray(t, float)
    d, o = gen.drive(t)
    lam = np.hypot(d, o)
    half = 0.5 * np.arctan2(o, d)
    ga, ge = rates_from(d, o, gen.J, gen.kT)
    return d, o, lam, np.cos(half), np.sin(half), ga, ge
