"""Quantum-jump unraveling of the phonon master equation.

Each trajectory is a pure state evolving under the non-Hermitian Hamiltonian
``H - (i/2)(gamma_a |-><-| + gamma_e |+><+|)`` until its squared norm drops
below a uniform random threshold; it then jumps to |+> (phonon absorbed,
heat +Lambda) or |-> (phonon emitted, heat -Lambda) with probabilities
proportional to gamma_a p_- and gamma_e p_+. The jump instant is located on
the dense output of the step, so the recorded Lambda(t) is exact to the
integrator tolerance.

All trajectories of a chunk share one adaptive step sequence. Random numbers
come from a Philox stream keyed by ``(seed, chunk)`` with a fixed chunk size,
so results do not depend on how the chunks are scheduled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .integrate import P as DENSE_P
from .integrate import DormandPrince, single_step
from .propagator import EvolutionSpec, Generator, coefficients_array
from .core import ground_state

CHUNK = 32768
# statistical errors dominate long before these tolerances matter
MC_RTOL, MC_ATOL = 1e-6, 1e-8
_BISECTIONS = 48


class _Draws:
    """Per-trajectory uniform draws consumed sequentially."""

    def __init__(self, rng: np.random.Generator, n: int, block: int = 8):
        self.rng = rng
        self.block = block
        self.buf = rng.random((n, block))
        self.ptr = np.zeros(n, dtype=np.int64)

    def take(self, rows: np.ndarray) -> np.ndarray:
        while np.any(self.ptr[rows] >= self.buf.shape[1]):
            self.buf = np.hstack([self.buf, self.rng.random((self.buf.shape[0], self.block))])
        out = self.buf[rows, self.ptr[rows]]
        self.ptr[rows] += 1
        return out


@dataclass
class JumpTrajectoryStats:
    """Per-trajectory results; heat uses the phonons->emitter positive sign."""

    heat: np.ndarray
    n_jumps: np.ndarray
    final_label: np.ndarray  # +1 / -1 for the state after the last jump, 0 if none
    first_heat: np.ndarray  # heat of the first jump, 0 if none
    final_states: np.ndarray  # normalized pure states at t_end, (n, 2)
    seed: int

    @property
    def n(self) -> int:
        return len(self.heat)

    @property
    def mean(self) -> float:
        return float(np.mean(self.heat))

    @property
    def stderr(self) -> float:
        return float(np.std(self.heat, ddof=1) / np.sqrt(self.n)) if self.n > 1 else float("nan")

    def final_rho(self) -> np.ndarray:
        psi = self.final_states
        return np.einsum("ni,nj->ij", psi, psi.conj()) / self.n

    def final_rho_stderr(self) -> np.ndarray:
        """Entrywise standard error of the ensemble state (real and imaginary parts)."""
        psi = self.final_states
        outer = np.einsum("ni,nj->nij", psi, psi.conj())
        s = np.sqrt(self.n)
        return (np.std(outer.real, axis=0, ddof=1) / s
                + 1j * np.std(outer.imag, axis=0, ddof=1) / s)

    def histogram(self, edges) -> np.ndarray:
        """Probability mass per bin; every trajectory must fall inside ``edges``."""
        counts, _ = np.histogram(self.heat, bins=edges)
        if counts.sum() != self.n:
            raise ValueError("histogram edges do not cover all trajectory heats")
        return counts / self.n

    def summary(self) -> dict:
        return {"mean_heat_ps_inv": self.mean, "stderr_ps_inv": self.stderr,
                "n": self.n, "seed": self.seed,
                "mean_jumps": float(np.mean(self.n_jumps))}

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def _mc_rhs(gen: Generator):
    def rhs(t, psi):
        d, o, lam, c, s, ga, ge = coefficients_array(gen, t)
        a, b = psi[..., 0], psi[..., 1]
        hz, hx = -0.5 * d, -0.5 * o
        k00 = ga * c * c + ge * s * s
        k01 = (ga - ge) * c * s
        k11 = ga * s * s + ge * c * c
        da = -1j * (hz * a + hx * b) - 0.5 * (k00 * a + k01 * b)
        db = -1j * (hx * a - hz * b) - 0.5 * (k01 * a + k11 * b)
        return np.stack([da, db], axis=-1)
    return rhs


def _interp_rows(st: DormandPrince, rows, s):
    """Dense output of the last step for a subset of rows at fractions ``s``."""
    K = st.K[:, rows]  # (7, m, 2)
    Q = np.einsum("jmi,jk->mik", K, DENSE_P)
    powers = np.stack([s, s**2, s**3, s**4], axis=-1)
    return st.y_old[rows] + st.h_last * np.einsum("mik,mk->mi", Q, powers)


def _initial_states(rho0, draws: _Draws, n: int) -> np.ndarray:
    w, v = np.linalg.eigh(rho0)
    w = np.clip(w, 0, None)
    w /= w.sum()
    if w.max() > 1 - 1e-15:
        return np.tile(v[:, np.argmax(w)], (n, 1)).astype(complex)
    pick = (draws.take(np.arange(n)) > w[0]).astype(int)
    return v[:, pick].T.astype(complex)


def _run_chunk(spec: EvolutionSpec, rho0, n: int, seed: int, chunk_index: int, rtol, atol):
    rng = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), chunk_index]))
    draws = _Draws(rng, n)
    gen = Generator(spec.pulse, spec.bath)
    rhs = _mc_rhs(gen)
    psi0 = _initial_states(rho0, draws, n)
    all_rows = np.arange(n)
    threshold = draws.take(all_rows)
    heat = np.zeros(n)
    n_jumps = np.zeros(n, dtype=np.int64)
    label = np.zeros(n, dtype=np.int8)
    first = np.zeros(n)

    t0, t1 = spec.span
    st = DormandPrince(rhs, t0, psi0, t1, rtol=rtol, atol=atol,
                       max_step=spec.step_cap)
    while st.step():
        norm2 = np.sum(np.abs(st.y) ** 2, axis=-1)
        rows = np.flatnonzero(norm2 < threshold)
        if rows.size == 0:
            continue
        y = st.y.copy()
        # jump instants by bisection on the interpolated norm
        lo = np.zeros(rows.size)
        hi = np.ones(rows.size)
        n_old = np.sum(np.abs(st.y_old[rows]) ** 2, axis=-1)
        lo[n_old < threshold[rows]] = 0.0  # cannot happen for a monotone norm
        for _ in range(_BISECTIONS):
            mid = 0.5 * (lo + hi)
            nm = np.sum(np.abs(_interp_rows(st, rows, mid)) ** 2, axis=-1)
            below = nm < threshold[rows]
            hi = np.where(below, mid, hi)
            lo = np.where(below, lo, mid)
        frac = hi
        t_jump = st.t_old + frac * st.h_last
        psi = _interp_rows(st, rows, frac)
        pending = rows
        while pending.size:
            d, o, lam, c, s, ga, ge = coefficients_array(gen, t_jump)
            psi = psi / np.linalg.norm(psi, axis=-1, keepdims=True)
            p_minus = np.abs(c * psi[:, 0] + s * psi[:, 1]) ** 2
            p_plus = np.abs(-s * psi[:, 0] + c * psi[:, 1]) ** 2
            w_abs = ga * p_minus
            w_tot = w_abs + ge * p_plus
            absorb = draws.take(pending) * w_tot < w_abs
            q = np.where(absorb, lam, -lam)
            heat[pending] += q
            first[pending] = np.where(n_jumps[pending] == 0, q, first[pending])
            n_jumps[pending] += 1
            label[pending] = np.where(absorb, 1, -1)
            new = np.where(absorb[:, None], np.stack([-s, c], axis=-1),
                           np.stack([c, s], axis=-1)).astype(complex)
            threshold[pending] = draws.take(pending)
            # carry the jumped rows to the end of the step
            h = st.t - t_jump
            moved = single_step(rhs, t_jump, new, h)
            y[pending] = moved
            # a second jump inside the same step: locate it on the sub-step
            n_new = np.sum(np.abs(moved) ** 2, axis=-1)
            again = n_new < threshold[pending]
            if not np.any(again):
                break
            sub = pending[again]
            lo = np.zeros(sub.size)
            hi = np.ones(sub.size)
            start, hs, t_s = new[again], h[again], t_jump[again]
            for _ in range(_BISECTIONS):
                mid = 0.5 * (lo + hi)
                ym = single_step(rhs, t_s, start, mid * hs)
                below = np.sum(np.abs(ym) ** 2, axis=-1) < threshold[sub]
                hi = np.where(below, mid, hi)
                lo = np.where(below, lo, mid)
            t_jump = t_s + hi * hs
            psi = single_step(rhs, t_s, start, hi * hs)
            pending = sub
        st.y = y
        st.f = rhs(st.t, y)
    final = st.y / np.linalg.norm(st.y, axis=-1, keepdims=True)
    return heat, n_jumps, label, first, final


def sample_trajectories(spec: EvolutionSpec, n: int, seed: int = 0, rho0=None,
                        chunk: int = CHUNK, rtol: float = MC_RTOL,
                        atol: float = MC_ATOL) -> JumpTrajectoryStats:
    """Run ``n`` jump trajectories over the evolution window.

    Deterministic for a given ``(seed, chunk)``; the chunk size fixes how
    trajectories map onto random streams.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rho0 = ground_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    parts = []
    for ci, start in enumerate(range(0, n, chunk)):
        parts.append(_run_chunk(spec, rho0, min(chunk, n - start), seed, ci, rtol, atol))
    heat, jumps, label, first, final = (np.concatenate(x) for x in zip(*parts))
    return JumpTrajectoryStats(heat, jumps, label, first, final, seed)


def total_variation(stats: JumpTrajectoryStats, dist, coarsen: int = 4) -> float:
    """TV distance between the trajectory histogram and a transformed P(Q).

    Bins are groups of ``coarsen`` cells of the distribution's Q grid.
    """
    q, p, dq = dist.q_values, dist.probabilities, dist.dq
    n = len(q) // coarsen * coarsen
    mass = (p[:n] * dq).reshape(-1, coarsen).sum(axis=1)
    edges = np.append(q[:n:coarsen] - 0.5 * dq, q[n - 1] + 0.5 * dq)
    hist = stats.histogram(edges)
    return 0.5 * float(np.sum(np.abs(mass - hist)))
