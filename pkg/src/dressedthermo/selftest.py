"""Fast invariant checks runnable from an installed package (no test files needed)."""

from __future__ import annotations

import math

import numpy as np

from .bath import BathSpec, rates_from
from .core import kelvin_to_angular_rate
from .fcs import CountingGrid, characteristic_scan, heat_distribution, mean_from_derivative
from .propagator import EvolutionSpec, evolve, evolve_counting
from .pulse import ChirpedGaussianSpec
from .steady import CWDriveSpec, steady_residual, steady_state
from .thermo import entropy_production, integrated_heat


def _checks():
    pulse = ChirpedGaussianSpec(tau0=1.0, theta0=4 * math.pi, chirp_a=5.0, delta0=1.0)
    bath = BathSpec(20.0)
    spec = EvolutionSpec(pulse, bath)
    traj = evolve(spec)

    tr = np.max(np.abs(np.trace(traj.rho, axis1=1, axis2=2) - 1))
    yield "trace preserved", tr < 1e-9, f"max |tr - 1| = {tr:.2e}"

    eig = np.min(np.linalg.eigvalsh(traj.rho))
    yield "positivity", eig > -1e-9, f"min eigenvalue = {eig:.2e}"

    g0 = evolve_counting(spec, u=0.0)
    yield "normalization G(0) = 1", abs(g0 - 1) < 1e-9, f"|G(0) - 1| = {abs(g0 - 1):.2e}"

    kT = kelvin_to_angular_rate(20.0)
    lam = math.hypot(1.3, 0.7)
    ga, ge = rates_from(1.3, 0.7, bath.spectral_density, kT)
    db = abs(ga / ge - math.exp(-lam / kT))
    yield "detailed balance", db < 1e-12, f"error = {db:.2e}"

    q = integrated_heat(traj)
    qd = mean_from_derivative(spec)
    rel = abs(qd - q) / max(abs(q), 1e-12)
    yield "first moment of G equals integrated heat", rel < 1e-3, f"relative error = {rel:.2e}"

    scan = characteristic_scan(spec, CountingGrid(du=math.pi / 40, n=256))
    dist = heat_distribution(scan)
    rel = abs(dist.mean - q) / max(abs(q), 1e-12)
    yield "transformed distribution mean", rel < 1e-3, f"relative error = {rel:.2e}"

    sigma = entropy_production(traj, 20.0)
    yield "second law", sigma >= -1e-6, f"entropy production = {sigma:.3e}"

    cw = CWDriveSpec(-1.0, 1.0)
    res = steady_residual(cw, steady_state(cw))
    yield "steady-state residual", res < 1e-10, f"residual = {res:.2e}"


def run(verbose: bool = True) -> int:
    """Run all checks; returns the number of failures."""
    failures = 0
    for name, ok, detail in _checks():
        failures += not ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return failures
