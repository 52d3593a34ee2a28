import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dressedthermo.bath import (EXCITON_J, SIV_J, BathSpec, SpectralDensity, bose_occupation,
                                phonon_rates, rates_from, spectral_density_at)
from dressedthermo.core import DriveFrame, kelvin_to_angular_rate


def test_bose_occupation_examples():
    bath = BathSpec(20.0)
    kT = bath.kT
    assert bose_occupation(kT * math.log(2), bath) == pytest.approx(1.0, rel=1e-13)
    assert bose_occupation(kT, bath) == pytest.approx(1 / (math.e - 1), rel=1e-13)
    assert bose_occupation(kT, bath) == pytest.approx(0.58198, abs=5e-6)
    assert bose_occupation(3.0, BathSpec(0.0)) == 0.0
    with pytest.raises(ValueError):
        bose_occupation(0.0, bath)


def test_spectral_density_examples():
    assert spectral_density_at(EXCITON_J, 0.0) == 0.0
    # independent arithmetic: 0.027 * 1^3 * exp(-(1/2.2)^2)
    assert spectral_density_at(EXCITON_J, 1.0) == pytest.approx(0.027 * math.exp(-1 / 4.84), rel=1e-14)
    # the quoted reference 0.021965 carries a rounding slip in its last digits
    assert spectral_density_at(EXCITON_J, 1.0) == pytest.approx(0.021965, rel=5e-4)
    assert spectral_density_at(EXCITON_J, 30.0) < 1e-12
    assert spectral_density_at(SIV_J, 300.0) < 1e-12
    with pytest.raises(ValueError):
        SpectralDensity("lorentzian", 1.0, 1.0)


@given(st.floats(0, 50))
def test_spectral_density_nonnegative(w):
    assert spectral_density_at(EXCITON_J, w) >= 0
    assert spectral_density_at(SIV_J, w) >= 0


def test_rates_reference_values():
    bath = BathSpec(20.0)
    kT = kelvin_to_angular_rate(20.0)
    n = 1 / math.expm1(1.0 / kT)
    assert n == pytest.approx(2.1501, abs=1e-4)
    J = 0.027 * math.exp(-1 / 4.84)
    ga_ref = math.pi * 1.0 * n * J / 2
    ga, ge = phonon_rates(DriveFrame(0.0, 1.0), bath)
    assert ga == pytest.approx(ga_ref, rel=1e-12)
    assert ge == pytest.approx(ga_ref * (n + 1) / n, rel=1e-12)
    assert ga == pytest.approx(0.074168, rel=1e-4)
    assert ge == pytest.approx(0.108676, rel=2e-4)


def test_rates_vanish_without_drive():
    assert phonon_rates(DriveFrame(2.0, 0.0), BathSpec(20.0)) == (0.0, 0.0)
    assert phonon_rates(DriveFrame(0.0, 0.0), BathSpec(20.0)) == (0.0, 0.0)


def test_zero_temperature_no_absorption():
    ga, ge = phonon_rates(DriveFrame(0.5, 1.0), BathSpec(0.0))
    assert ga == 0.0 and ge > 0


@pytest.mark.parametrize("J", [EXCITON_J, SIV_J])
def test_detailed_balance_random(J):
    rng = np.random.default_rng(7)
    d = rng.uniform(-5, 5, 100)
    o = rng.uniform(0, 5, 100)
    T = rng.uniform(4, 50, 100)
    for di, oi, Ti in zip(d, o, T):
        lam = math.hypot(di, oi)
        if lam <= 1e-3 or oi == 0:
            continue
        kT = kelvin_to_angular_rate(Ti)
        ga, ge = rates_from(di, oi, J, kT)
        assert float(ga / ge) == pytest.approx(math.exp(-lam / kT), rel=1e-12)


@given(st.floats(-5, 5), st.floats(1e-3, 5), st.floats(1, 60))
def test_rates_even_in_detuning(d, o, T):
    bath = BathSpec(T)
    assert phonon_rates(DriveFrame(d, o), bath) == phonon_rates(DriveFrame(-d, o), bath)


def test_small_splitting_limit():
    bath = BathSpec(20.0)
    ga_small, _ = phonon_rates(DriveFrame(0.0, 1e-4), bath)
    ga_one, _ = phonon_rates(DriveFrame(0.0, 1.0), bath)
    assert ga_small < 1e-6 * ga_one


def test_vectorized_matches_scalar():
    d = np.linspace(-3, 3, 7)
    o = np.linspace(0, 2, 7)
    ga, ge = rates_from(d, o, EXCITON_J, 2.0)
    for i in range(7):
        a, e = rates_from(d[i], o[i], EXCITON_J, 2.0)
        assert ga[i] == a and ge[i] == e
