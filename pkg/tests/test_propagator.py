import math

import numpy as np
import pytest
from scipy.linalg import expm

from dressedthermo.bath import BathSpec, SpectralDensity, phonon_rates
from dressedthermo.core import DriveFrame, dressed_frame, ground_state, hamiltonian
from dressedthermo.integrate import solve
from dressedthermo.propagator import (ConstantDrive, EvolutionSpec, Generator, counting_rhs,
                                      evolve, evolve_counting, evolve_counting_batch,
                                      lindblad_rhs)
from dressedthermo.pulse import ChirpedGaussianSpec

from conftest import random_density_matrix

NO_PHONONS = BathSpec(20.0, SpectralDensity("super_ohmic_gaussian_cutoff", 0.0, 2.2))
TEST_PULSE = ChirpedGaussianSpec(1.0, 4 * math.pi, 5.0, 1.0)


def superoperator(t, spec):
    """Frozen generator on row-major vec(rho), built from core and bath only."""
    frame = spec.pulse.frame(t)
    H = hamiltonian(frame.delta, frame.omega)
    df = dressed_frame(frame)
    ga, ge = phonon_rates(frame, spec.bath)
    I = np.eye(2)
    L = -1j * (np.kron(H, I) - np.kron(I, H.T))
    for O, g in ((df.jump_up, ga), (df.jump_down, ge)):
        OdO = O.conj().T @ O
        L = L + g * (np.kron(O, O.conj()) - 0.5 * np.kron(OdO, I) - 0.5 * np.kron(I, OdO.T))
    return L


def thermal_dressed(frame, bath):
    df = dressed_frame(frame)
    ga, ge = phonon_rates(frame, bath)
    p_plus = ga / (ga + ge)
    return (p_plus * np.outer(df.plus, df.plus.conj())
            + (1 - p_plus) * np.outer(df.minus, df.minus.conj()))


def test_pure_commutator_without_phonons(rng):
    spec = EvolutionSpec(TEST_PULSE, NO_PHONONS)
    rho = random_density_matrix(rng)
    t = 0.3
    f = spec.pulse.frame(t)
    H = hamiltonian(f.delta, f.omega)
    d = lindblad_rhs(t, rho, spec)
    np.testing.assert_allclose(d, -1j * (H @ rho - rho @ H), atol=1e-15)
    assert abs(np.trace(d)) < 1e-15


def test_detailed_balance_fixed_point():
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0))
    t = 0.4
    rho = thermal_dressed(spec.pulse.frame(t), spec.bath)
    assert np.max(np.abs(lindblad_rhs(t, rho, spec))) < 1e-15


@pytest.mark.parametrize("t", [-3.0, 0.0, 0.7, 2.5])
def test_rhs_matches_matrix_exponential(rng, t):
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0))
    rho = random_density_matrix(rng)
    L = superoperator(t, spec)
    dt = 1e-6
    v = rho.ravel()
    # central difference of the exponential: error O(dt^2)
    ref = ((expm(L * dt) - expm(-L * dt)) @ v / (2 * dt)).reshape(2, 2)
    np.testing.assert_allclose(lindblad_rhs(t, rho, spec), ref, atol=1e-8)
    # one-sided difference as stated, at its own O(dt) accuracy
    one_sided = ((expm(L * dt) @ v - v) / dt).reshape(2, 2)
    np.testing.assert_allclose(lindblad_rhs(t, rho, spec), one_sided,
                               atol=dt * np.linalg.norm(L, 2) ** 2)


def test_fast_derivative_matches_reference(rng):
    spec = EvolutionSpec(TEST_PULSE, BathSpec(12.0))
    gen = Generator(spec.pulse, spec.bath)
    for t in np.linspace(-4, 4, 9):
        rho = random_density_matrix(rng)
        d = gen.derivative(t, *rho.ravel())
        np.testing.assert_allclose(np.array(d[:4]).reshape(2, 2), lindblad_rhs(t, rho, spec),
                                   atol=1e-13)
        u = rng.uniform(-3, 3)
        rho_u = rho + 0.1j * rng.normal(size=(2, 2))
        d = gen.derivative(t, *rho_u.ravel(), u=u)
        np.testing.assert_allclose(np.array(d[:4]).reshape(2, 2), counting_rhs(t, rho_u, spec, u),
                                   atol=1e-13)


def test_counting_rhs_zero_field_identical(rng):
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0))
    rho = random_density_matrix(rng)
    a = counting_rhs(0.2, rho, spec, 0.0)
    b = lindblad_rhs(0.2, rho, spec)
    assert np.array_equal(a, b)


def test_counting_rhs_without_phonons_ignores_u(rng):
    spec = EvolutionSpec(TEST_PULSE, NO_PHONONS)
    rho = random_density_matrix(rng)
    np.testing.assert_allclose(counting_rhs(0.2, rho, spec, 1.3), counting_rhs(0.2, rho, spec, -4.0),
                               atol=1e-15)


@pytest.mark.parametrize("u", [0.3, -1.1, 2.7])
def test_counting_trace_derivative(u):
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0))
    t = 0.5
    frame = spec.pulse.frame(t)
    df = dressed_frame(frame)
    ga, ge = phonon_rates(frame, spec.bath)
    p_plus, p_minus = 0.3, 0.7
    rho = p_plus * np.outer(df.plus, df.plus.conj()) + p_minus * np.outer(df.minus, df.minus.conj())
    lam = df.lam
    # rates are transition rates, so no factor of 2 appears here
    expected = (np.exp(-1j * u * lam) - 1) * ga * p_minus + (np.exp(1j * u * lam) - 1) * ge * p_plus
    assert np.trace(counting_rhs(t, rho, spec, u)) == pytest.approx(expected, abs=1e-14)


def test_no_drive_leaves_ground_state():
    spec = EvolutionSpec(ChirpedGaussianSpec(1.0, 0.0, 3.0, 0.5), BathSpec(20.0))
    traj = evolve(spec)
    np.testing.assert_allclose(traj.rho, np.broadcast_to(ground_state(), traj.rho.shape), atol=1e-14)
    assert traj.total_heat == 0.0


def test_adiabatic_rapid_passage():
    spec = EvolutionSpec(ChirpedGaussianSpec(2.0, 6 * math.pi, 20.0, 0.0), BathSpec(0.0))
    traj = evolve(spec)
    assert traj.rho[-1, 1, 1].real > 0.99


def test_resonant_pi_pulse():
    om = 1.3
    gen = Generator(ConstantDrive(0.0, om), NO_PHONONS)

    def rhs(t, y):
        return np.array(gen.derivative(t, *y)[:4])

    sol = solve(rhs, (0.0, math.pi / om), ground_state().ravel(), rtol=1e-12, atol=1e-14)
    rho = sol.y[-1].reshape(2, 2)
    assert rho[1, 1].real == pytest.approx(1.0, abs=1e-6)
    assert rho[0, 0].real == pytest.approx(0.0, abs=1e-6)


def test_hermiticity_preserved_without_symmetrizing(rng):
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0))
    gen = Generator(spec.pulse, spec.bath)

    def rhs(t, y):
        return np.array(gen.derivative(t, *y)[:4])

    rho0 = random_density_matrix(rng)
    sol = solve(rhs, spec.span, rho0.ravel(), t_eval=np.linspace(*spec.span, 50),
                rtol=1e-8, atol=1e-10, max_step=spec.step_cap)
    y = sol.y
    assert np.max(np.abs(y[:, 1] - np.conj(y[:, 2]))) < 1e-12
    assert np.max(np.abs(y[:, 0].imag)) < 1e-12


def test_trajectory_invariants():
    traj = evolve(EvolutionSpec(TEST_PULSE, BathSpec(30.0)))
    assert np.all(np.diff(traj.t) > 0)
    assert np.max(np.abs(np.trace(traj.rho, axis1=1, axis2=2) - 1)) < 1e-9
    assert np.min(np.linalg.eigvalsh(traj.rho)) > -1e-9
    np.testing.assert_allclose(traj.p_plus + traj.p_minus, 1, atol=1e-9)
    assert traj.rows().shape == (len(traj), len(traj.COLUMNS))


def test_heat_matches_quadrature_of_current():
    from scipy.integrate import simpson
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0), n_samples=4001)
    traj = evolve(spec)
    assert traj.total_heat == pytest.approx(simpson(traj.heat_current, x=traj.t), rel=1e-6)


def test_characteristic_function_properties():
    spec = EvolutionSpec(TEST_PULSE, BathSpec(20.0))
    assert abs(evolve_counting(spec, u=0.0) - 1) < 1e-9
    u = np.linspace(0.05, 3, 12)
    G = evolve_counting_batch(spec, np.concatenate([u, -u]))
    Gp, Gm = G[:12], G[12:]
    np.testing.assert_allclose(Gm, np.conj(Gp), atol=1e-8)
    assert np.max(np.abs(G)) <= 1 + 1e-9
    # batch and single evaluations agree
    assert evolve_counting(spec, u=u[3]) == pytest.approx(Gp[3], abs=1e-8)


def test_characteristic_function_without_phonons():
    spec = EvolutionSpec(TEST_PULSE, NO_PHONONS)
    G = evolve_counting_batch(spec, np.linspace(-5, 5, 11))
    np.testing.assert_allclose(G, 1, atol=1e-9)


def test_spec_validation():
    with pytest.raises(ValueError):
        EvolutionSpec(TEST_PULSE, t_start=1.0, t_end=0.0)
    with pytest.raises(ValueError):
        EvolutionSpec(TEST_PULSE, rtol=0.5)
    spec = EvolutionSpec(TEST_PULSE)
    tau = TEST_PULSE.params().tau
    assert spec.span == pytest.approx((-6 * tau, 6 * tau))
    assert spec.step_cap == pytest.approx(tau / 100)
