"""Heat, entropy and engine bookkeeping on top of sampled trajectories.

Heat is counted positive when it flows from the phonons into the emitter.
Temperatures enter the formulas as k_B T / hbar (ps^-1) so that heat over
temperature is an entropy in units of k_B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .core import kelvin_to_angular_rate
from .propagator import TrajectoryRecord


class NotHeatAbsorbingError(ValueError):
    """The stroke does not take heat from the hot bath."""


@dataclass(frozen=True)
class EngineSpec:
    hot_T: float = 20.0  # K
    cold_T: float = 2.7  # K

    def __post_init__(self):
        if not 0 < self.cold_T < self.hot_T:
            raise ValueError(f"need 0 < cold_T < hot_T, got {self.cold_T}, {self.hot_T}")

    @property
    def carnot(self) -> float:
        return 1.0 - self.cold_T / self.hot_T


def heat_current(lam, gamma_a, gamma_e, p_plus, p_minus):
    """Lambda (gamma_a p_- - gamma_e p_+), ps^-2; works on scalars or arrays."""
    return lam * (gamma_a * p_minus - gamma_e * p_plus)


def integrated_heat(traj: TrajectoryRecord) -> float:
    """Total heat over the window (ps^-1).

    The value is accumulated alongside the state by the integrator; see
    :func:`integrated_heat_quadrature` for the sample-based estimate.
    """
    return traj.total_heat


def integrated_heat_quadrature(traj: TrajectoryRecord) -> float:
    """Simpson quadrature of the sampled heat current."""
    cur = heat_current(traj.lam, traj.gamma_a, traj.gamma_e, traj.p_plus, traj.p_minus)
    return float(simpson(cur, x=traj.t))


def ts_trajectory(traj: TrajectoryRecord) -> np.ndarray:
    """Rows of (t [ps], T_eff [K], S_vN [k_B], S_dressed-populations [k_B])."""
    return np.column_stack([traj.t, traj.t_eff, traj.entropy, traj.diagonal_entropy])


def entropy_change(traj: TrajectoryRecord) -> float:
    return float(traj.entropy[-1] - traj.entropy[0])


def entropy_production(traj: TrajectoryRecord, hot_T: float) -> float:
    """System entropy change minus absorbed heat over the bath temperature (k_B)."""
    if hot_T <= 0:
        raise ValueError("entropy production needs a positive bath temperature")
    return entropy_change(traj) - integrated_heat(traj) / kelvin_to_angular_rate(hot_T)


def engine_efficiency(traj: TrajectoryRecord, engine: EngineSpec) -> tuple[float, float]:
    """Efficiency of the cycle closed by a reversible stroke at ``cold_T``.

    The reversible stroke returns the emitter to its initial state, dumping
    heat ``T_c dS`` into the cold bath, so eta = 1 - T_c dS / Q_h. Returns
    ``(eta, eta / eta_Carnot)``.
    """
    q_hot = integrated_heat(traj)
    if q_hot <= 0:
        raise NotHeatAbsorbingError(f"not a heat-absorbing stroke (Q_h = {q_hot:.4g} ps^-1)")
    eta = 1.0 - kelvin_to_angular_rate(engine.cold_T) * entropy_change(traj) / q_hot
    return float(eta), float(eta / engine.carnot)


def find_plateau(t, temperature, *, below: float, band: float | None = None,
                 max_rel_variation: float = 0.2) -> tuple[float, float, float]:
    """Longest interval where ``temperature`` stays finite and under ``below``.

    Within the interval (max - min) / max must stay under
    ``max_rel_variation``; with ``band`` the values must also be at least
    ``(1 - band) * below``. Returns ``(t_start, t_end, length)``; length 0
    when nothing qualifies.
    """
    t = np.asarray(t, float)
    T = np.asarray(temperature, float)
    ok = np.isfinite(T) & (T >= 0) & (T < below)
    if band is not None:
        ok &= T >= (1 - band) * below
    best = (np.nan, np.nan, 0.0)
    n = len(t)
    i = 0
    while i < n:
        if not ok[i]:
            i += 1
            continue
        lo = hi = T[i]
        j = i
        while j + 1 < n and ok[j + 1]:
            lo2, hi2 = min(lo, T[j + 1]), max(hi, T[j + 1])
            if hi2 > 0 and (hi2 - lo2) / hi2 >= max_rel_variation:
                break
            lo, hi, j = lo2, hi2, j + 1
        length = t[j] - t[i]
        if length > best[2]:
            best = (float(t[i]), float(t[j]), float(length))
        i += 1
    return best
