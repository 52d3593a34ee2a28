"""Dormand-Prince 5(4) integrator with PI step control and dense output.

Works on complex arrays of any shape, so a whole batch of counting-field
values or jump trajectories can share one step sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
A_PAD = np.zeros((6, 6))
for _i, _row in enumerate(A):
    A_PAD[_i, :len(_row)] = _row
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th and embedded 4th order weights, 7 stages (FSAL)
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension, y(t + s h) = y + h * sum_j K_j (P[j] . [s, s^2, s^3, s^4])
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR, MAX_FACTOR = 0.2, 5.0
# PI controller exponents for a 5th order pair
BETA1, BETA2 = 0.7 / 5, 0.4 / 5


class IntegrationError(RuntimeError):
    pass


class DormandPrince:
    """Explicit adaptive stepper.

    ``fun(t, y)`` must return an array shaped like ``y``. After each call to
    :meth:`step` the interval ``[t_old, t]`` is available to
    :meth:`interpolate`.
    """

    def __init__(self, fun, t0, y0, t_bound, *, rtol=1e-8, atol=1e-10,
                 max_step=np.inf, first_step=None, fixed_step=None):
        self.fun = fun
        self.t = float(t0)
        self.y = np.array(y0, dtype=complex)
        self.t_bound = float(t_bound)
        self.rtol, self.atol = rtol, atol
        self.max_step = max_step
        self.fixed_step = fixed_step
        self.f = fun(self.t, self.y)
        self.nfev = 1
        self.n_accepted = 0
        self.n_rejected = 0
        self._err_prev = 1e-4
        self._just_rejected = False
        self.K = np.empty((7,) + self.y.shape, dtype=complex)
        if fixed_step is not None:
            self.h = fixed_step
        elif first_step is not None:
            self.h = min(first_step, max_step)
        else:
            self.h = self._initial_step()
        self.t_old = self.t
        self.y_old = self.y

    def _norm(self, x):
        # RMS over the last axis, worst case over any batch axes
        if x.ndim <= 1:
            return float(np.sqrt(np.mean(np.abs(x) ** 2)))
        return float(np.max(np.sqrt(np.mean(np.abs(x) ** 2, axis=-1))))

    def _initial_step(self):
        scale = self.atol + self.rtol * np.abs(self.y)
        d0 = self._norm(self.y / scale)
        d1 = self._norm(self.f / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, self.max_step, self.t_bound - self.t)
        y1 = self.y + h0 * self.f
        f1 = self.fun(self.t + h0, y1)
        self.nfev += 1
        d2 = self._norm((f1 - self.f) / scale) / h0
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / 5)
        return min(100 * h0, h1, self.max_step)

    def _attempt(self, h):
        K = self.K
        Kf = K.reshape(7, -1)
        K[0] = self.f
        t, y = self.t, self.y
        shape = y.shape
        for s in range(1, 6):
            dy = (A_PAD[s, :s] @ Kf[:s]).reshape(shape)
            K[s] = self.fun(t + C[s] * h, y + h * dy)
        y_new = y + h * (B @ Kf[:6]).reshape(shape)
        f_new = self.fun(t + h, y_new)
        K[6] = f_new
        self.nfev += 6
        return y_new, f_new

    def step(self):
        """Advance by one accepted step; returns False once t_bound is reached."""
        if self.t >= self.t_bound:
            return False
        t = self.t
        h = self.h
        while True:
            h = min(h, self.max_step, self.t_bound - t)
            if h < 1e-14 * max(1.0, abs(t)):
                raise IntegrationError(f"step size underflow at t = {t:.6g} (h = {h:.3g})")
            y_new, f_new = self._attempt(h)
            if self.fixed_step is not None:
                break
            scale = self.atol + self.rtol * np.maximum(np.abs(self.y), np.abs(y_new))
            err = self._norm(h * (E @ self.K.reshape(7, -1)).reshape(self.y.shape) / scale)
            if err <= 1.0:
                err = max(err, 1e-10)
                factor = SAFETY * err ** -BETA1 * self._err_prev ** BETA2
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
                if self._just_rejected:
                    factor = min(1.0, factor)
                self._err_prev = err
                self._just_rejected = False
                self.h = h * factor
                break
            self.n_rejected += 1
            self._just_rejected = True
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
        self.t_old, self.y_old = t, self.y
        self.t = t + h if self.t_bound - (t + h) > 1e-12 * max(1.0, abs(t)) else self.t_bound
        self.y, self.f = y_new, f_new
        self.h_last = self.t - self.t_old
        self.n_accepted += 1
        return True

    def interpolate(self, t):
        """Fourth-order dense output on the last accepted step."""
        h = self.h_last
        s = (float(t) - self.t_old) / h
        w = P @ np.array([s, s * s, s**3, s**4])
        return self.y_old + h * (w @ self.K.reshape(7, -1)).reshape(self.y.shape)


def single_step(fun, t, y, h):
    """One unadapted 5th-order step with per-row step sizes.

    ``t`` and ``h`` are arrays broadcasting against the leading axis of ``y``;
    ``fun`` must accept an array of times.
    """
    hb = h.reshape(h.shape + (1,) * (y.ndim - h.ndim))
    K = [fun(t, y)]
    for s in range(1, 6):
        dy = A[s][0] * K[0]
        for j in range(1, s):
            dy = dy + A[s][j] * K[j]
        K.append(fun(t + C[s] * h, y + hb * dy))
    return y + hb * sum(b * k for b, k in zip(B, K) if b != 0.0)


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    nfev: int
    n_accepted: int
    n_rejected: int


def solve(fun, t_span, y0, *, t_eval=None, **options) -> Solution:
    """Integrate over ``t_span``; sample at ``t_eval`` via dense output."""
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    stepper = DormandPrince(fun, t0, y0, t1, **options)
    if t_eval is None:
        ts, ys = [t0], [stepper.y]
        while stepper.step():
            ts.append(stepper.t)
            ys.append(stepper.y)
        return Solution(np.array(ts), np.array(ys), stepper.nfev,
                        stepper.n_accepted, stepper.n_rejected)
    t_eval = np.asarray(t_eval, float)
    if np.any(np.diff(t_eval) < 0) or t_eval[0] < t0 or t_eval[-1] > t1:
        raise ValueError("t_eval must be sorted and inside t_span")
    out = np.empty((len(t_eval),) + stepper.y.shape, dtype=complex)
    i = 0
    while i < len(t_eval) and t_eval[i] <= t0:
        out[i] = stepper.y
        i += 1
    while i < len(t_eval) and stepper.step():
        j = np.searchsorted(t_eval, stepper.t, side="right")
        if j > i:
            out[i:j] = [stepper.interpolate(tt) for tt in t_eval[i:j]]
            if t_eval[j - 1] == stepper.t:
                out[j - 1] = stepper.y
            i = j
    return Solution(t_eval, out, stepper.nfev, stepper.n_accepted, stepper.n_rejected)
