"""Embedded Runge-Kutta stepping with PI step-size control.

The Dormand-Prince 8(5,3) tableau is taken from SciPy; the stepping loop is
local so that accepted/rejected counts and output times are under our control.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop

from .errors import StiffnessError

_S = _dop.N_STAGES
_A = _dop.A[:_S, :_S]
_B = _dop.B
_C = _dop.C[:_S]
_E3 = _dop.E3
_E5 = _dop.E5
_ORDER = 7  # error estimator order

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# PI gains in the Gustafsson form, k = order + 1
_ALPHA = 0.7 / (_ORDER + 1)
_BETA = 0.4 / (_ORDER + 1)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    nfev: int = 0

    def as_dict(self):
        return {"accepted": self.accepted, "rejected": self.rejected, "nfev": self.nfev}


@dataclass
class RKResult:
    t: np.ndarray
    y: np.ndarray
    stats: StepStats = field(default_factory=StepStats)


def _error_norm(K, h, scale):
    err5 = (K.T @ _E5) / scale
    err3 = (K.T @ _E3) / scale
    e5 = np.sum(err5**2)
    e3 = np.sum(err3**2)
    if e5 == 0.0 and e3 == 0.0:
        return 0.0
    return abs(h) * e5 / np.sqrt((e5 + 0.01 * e3) * scale.size)


def _initial_step(fun, t0, y0, f0, rtol, atol, direction):
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = fun(t0 + h0 * direction, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (_ORDER + 1))
    return min(100 * h0, h1)


def integrate(fun, t0, y0, t1, rtol=1e-10, atol=1e-12, t_eval=None, max_steps=10_000_000, record_steps=True):
    """Integrate ``y' = fun(t, y)`` from ``t0`` to ``t1`` (``t1 > t0``).

    Output is taken at every accepted step (``record_steps``) or only at the
    ``t_eval`` times, which the stepper lands on exactly.
    """
    y = np.asarray(y0, dtype=float).ravel().copy()
    t = float(t0)
    t1 = float(t1)
    if not t1 > t:
        raise ValueError("t1 must exceed t0")
    stats = StepStats()

    def f(tt, yy):
        stats.nfev += 1
        return fun(tt, yy)

    targets = None
    if t_eval is not None:
        targets = np.asarray(t_eval, dtype=float)
        if np.any(np.diff(targets) <= 0) or targets[0] < t or targets[-1] > t1:
            raise ValueError("t_eval must be increasing and inside [t0, t1]")
        record_steps = False
    ts, ys = [], []
    next_target = 0
    if targets is not None and targets.size and targets[0] == t:
        ts.append(t)
        ys.append(y.copy())
        next_target = 1
    elif targets is None:
        ts.append(t)
        ys.append(y.copy())

    fy = f(t, y)
    h = _initial_step(f, t, y, fy, rtol, atol, 1.0)
    err_prev = 1e-4
    K = np.empty((_S + 1, y.size))
    while t < t1:
        if stats.accepted + stats.rejected >= max_steps:
            raise StiffnessError(f"step budget exhausted at t = {t!r}", t)
        stop = t1 if targets is None or next_target >= targets.size else targets[next_target]
        h = min(h, stop - t)
        if h <= 10 * np.spacing(max(abs(t), abs(stop))):
            if stop - t <= 10 * np.spacing(max(abs(t), abs(stop))):
                h = stop - t
            else:
                raise StiffnessError(f"step size underflow at t = {t!r}", t)
        K[0] = fy
        for s in range(1, _S):
            dy = K[:s].T @ _A[s, :s] * h
            K[s] = f(t + _C[s] * h, y + dy)
        y_new = y + h * (K[:-1].T @ _B)
        t_new = stop if h == stop - t else t + h
        f_new = f(t_new, y_new)
        K[-1] = f_new
        scale = atol + np.maximum(np.abs(y), np.abs(y_new)) * rtol
        err = _error_norm(K, h, scale)
        if err <= 1.0:
            stats.accepted += 1
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err**-_ALPHA * err_prev**_BETA))
            err_prev = max(err, 1e-4)
            t, y, fy = t_new, y_new, f_new
            if record_steps:
                ts.append(t)
                ys.append(y.copy())
            elif targets is not None and next_target < targets.size and t == targets[next_target]:
                ts.append(t)
                ys.append(y.copy())
                next_target += 1
            h *= factor
        else:
            stats.rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** (-1.0 / (_ORDER + 1)))
    if targets is None and not record_steps:
        ts.append(t)
        ys.append(y.copy())
    return RKResult(np.array(ts), np.array(ys), stats)
