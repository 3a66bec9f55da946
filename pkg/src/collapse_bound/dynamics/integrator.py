"""Adaptive Dormand-Prince 5(4) integrator with exact output times."""
import math
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from ..errors import IntegrationError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegratorSpec:
    rtol: float = 1e-9
    atol: float = 1e-12
    max_steps: int = 1_000_000
    first_step: float = 0.0  # 0 selects automatically


@dataclass
class IntegrationStats:
    accepted: int = 0
    rejected: int = 0
    rhs_evals: int = 0
    last_step: float = 0.0


def _error_norm(err, y0, y1, spec):
    scale = spec.atol + spec.rtol * np.maximum(np.abs(y0), np.abs(y1))
    return math.sqrt(float(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, spec, span):
    # Hairer, Norsett & Wanner II.4 heuristic
    scale = spec.atol + spec.rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean(np.abs(y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = math.sqrt(float(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(f: Callable, y0, times, spec: IntegratorSpec = IntegratorSpec(),
              callback: Callable = None):
    """Integrate ``y' = f(t, y)`` and return states at ``times``.

    ``times`` must be non-decreasing; the first entry is the initial time.
    Steps are clipped so every requested time is hit exactly. When
    ``callback(t, y)`` is given it is called at each output time and its
    return value collected instead of the state.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise IntegrationError("times must be a non-empty 1-D array")
    if np.any(np.diff(times) < 0):
        raise IntegrationError("times must be non-decreasing")
    y = np.array(y0, dtype=complex)
    t = float(times[0])
    stats = IntegrationStats()
    out: List = []

    def emit(tt, yy):
        out.append(callback(tt, yy) if callback is not None else yy.copy())

    emit(t, y)
    if times.size == 1:
        return out, stats

    k = [None] * 7
    k[0] = f(t, y)
    stats.rhs_evals += 1
    span = float(times[-1] - times[0])
    h = spec.first_step or (_initial_step(f, t, y, k[0], spec, span) if span > 0 else 0.0)
    stats.rhs_evals += 1
    steps = 0
    for target in times[1:]:
        while t < target:
            if steps >= spec.max_steps:
                raise IntegrationError("maximum number of steps exceeded", t=t, step=h)
            clipped = h >= target - t
            hh = target - t if clipped else h
            if hh <= 16 * np.finfo(float).eps * max(abs(t), 1e-300) or hh <= 0:
                raise IntegrationError("step size underflow", t=t, step=hh)
            for s in range(1, 7):
                ys = y.copy()
                for j, a in enumerate(_A[s]):
                    if a:
                        ys += (hh * a) * k[j]
                k[s] = f(t + _C[s] * hh, ys)
            stats.rhs_evals += 6
            y_new = ys  # stage 7 is evaluated at the 5th-order solution (FSAL)
            err = hh * sum(_E[j] * k[j] for j in range(7) if _E[j])
            en = _error_norm(err, y, y_new, spec)
            if not math.isfinite(en):
                raise IntegrationError("non-finite state encountered", t=t, step=hh)
            steps += 1
            if en <= 1.0:
                t = float(target) if clipped else t + hh
                y = y_new
                k[0] = k[6]
                stats.accepted += 1
                stats.last_step = hh
                fac = _MAX_FACTOR if en == 0 else min(_MAX_FACTOR, _SAFETY * en ** -0.2)
                # keep the natural step if this one was only shortened to hit the output time
                h = max(h, hh * fac) if clipped else hh * fac
            else:
                stats.rejected += 1
                h = hh * max(_MIN_FACTOR, _SAFETY * en ** -0.2)
        emit(t, y)
    return out, stats


@dataclass
class Trajectory:
    """Sampled evolution of a density matrix.

    ``excited`` and ``occupations`` are the qubit excited population and
    per-mode phonon numbers at each sample.
    """
    times: np.ndarray
    excited: np.ndarray
    occupations: np.ndarray
    trace_error: np.ndarray
    hermiticity: np.ndarray
    min_eigenvalue: np.ndarray
    final_state: np.ndarray
    states: list = field(default_factory=list)
    stats: IntegrationStats = None
