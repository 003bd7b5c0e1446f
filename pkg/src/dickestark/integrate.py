"""Dormand-Prince 5(4) embedded Runge-Kutta integrator with step-size control.

Steps are clipped so that every requested output time is hit exactly; no
interpolation is involved.  The local error is measured in the max norm, so
components that stay identically zero never influence the step sequence.
"""

from __future__ import annotations

import numpy as np

from .errors import IntegrationError

RTOL = 1e-8
ATOL = 1e-10

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
_MAX_FACTOR = 10.0
_ORDER = 5


def _error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale, initial=0.0))


def _initial_step(rhs, t0, y0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.max(np.abs(y0) / scale, initial=0.0))
    d1 = float(np.max(np.abs(f0) / scale, initial=0.0))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = float(np.max(np.abs(f1 - f0) / scale, initial=0.0)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)
    return min(100 * h0, h1, span)


def integrate(rhs, y0, times, *, rtol=RTOL, atol=ATOL, post_step=None, max_steps=10_000_000):
    """Integrate ``dy/dt = rhs(t, y)`` and return the solution at each of ``times``.

    ``times`` must be strictly increasing; ``times[0]`` is the initial time.
    ``post_step`` (optional) maps each accepted state to a corrected state, e.g.
    a Hermitian projection.  Raises :class:`IntegrationError` when the step size
    underflows or the step budget is exhausted.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a nonempty 1-d sequence")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    y = np.array(y0, copy=True)
    out = np.empty((times.size,) + y.shape, dtype=y.dtype)
    out[0] = y
    if times.size == 1:
        return out

    t = times[0]
    f = rhs(t, y)
    h = _initial_step(rhs, t, y, f, rtol, atol, times[-1] - times[0])
    k = np.empty((7,) + y.shape, dtype=np.result_type(y, f))
    steps = 0
    for i_out in range(1, times.size):
        target = times[i_out]
        while t < target:
            if steps >= max_steps:
                raise IntegrationError(f"step budget of {max_steps} exhausted at tau={t}", tau=t)
            hit = target - t <= h * 1.01
            h_try = target - t if hit else h
            if h_try < 16 * np.finfo(float).eps * max(1.0, abs(t)):
                raise IntegrationError(f"step size underflow at tau={t}", tau=t)

            k[0] = f
            for s in range(1, 7):
                ys = y + h_try * np.tensordot(_A[s], k[:s], axes=1)
                k[s] = rhs(t + _C[s] * h_try, ys)
            y_new = ys  # stage 7 evaluates at the 5th-order solution (FSAL)
            err = h_try * np.tensordot(_E, k, axes=1)
            en = _error_norm(err, y, y_new, rtol, atol)
            steps += 1

            if en <= 1.0:
                t = target if hit else t + h_try
                if post_step is not None:
                    y = post_step(y_new)
                    f = rhs(t, y)
                else:
                    y = y_new
                    f = k[6].copy()
                factor = _MAX_FACTOR if en == 0 else min(_MAX_FACTOR, _SAFETY * en ** (-1 / _ORDER))
                if hit:
                    # a clipped step says nothing about the admissible size
                    h = max(h, h_try * factor)
                else:
                    h = h_try * factor
            else:
                h = h_try * max(_MIN_FACTOR, _SAFETY * en ** (-1 / _ORDER))
        out[i_out] = y
    return out
