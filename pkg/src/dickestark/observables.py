"""Pulse observables and suppression analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import Couplings, EnsembleSpec, c_function, f_modulation, format_m, ladder_coefficients, stark_argument, stark_phases
from .errors import DomainError, NoCriticalNumberError
from .states import LadderState, PulseTrace

CRITICAL_CHECK = 1e-12


def intensity(spec: EnsembleSpec, couplings: Couplings, state) -> float:
    """Emitted intensity q * sum_m 2 chi^2 g_{m,m-1} C_{m-1} p_m (units of hbar omega_Gamma per tau)."""
    if not isinstance(state, LadderState):
        state = LadderState(state)
    p = state.check(spec).populations
    m = spec.m_values
    gamma0 = 2.0 * couplings.chi**2
    g = ladder_coefficients(spec)
    c_below = c_function(stark_argument(spec, couplings, m - 1))
    return float(couplings.q * gamma0 * np.sum(g * c_below * p))


def _sech2(a):
    e = np.exp(-2.0 * np.abs(a))
    return 4.0 * e / (1.0 + e) ** 2


def sech2_reference(n_atoms: int, gamma_w: float, q: float, tau):
    """Mean-field Wiener pulse q N^2/4 gamma sech^2(gamma N/2 (tau - tau0)), tau0 = ln N / (gamma N)."""
    if n_atoms < 2:
        raise DomainError(f"the sech^2 pulse needs n_atoms >= 2, got {n_atoms}")
    if gamma_w <= 0:
        raise DomainError(f"gamma_w must be > 0, got {gamma_w}")
    tau0 = sech2_delay(n_atoms, gamma_w)
    out = q * n_atoms**2 / 4 * gamma_w * _sech2(gamma_w * n_atoms / 2 * (np.asarray(tau, dtype=float) - tau0))
    return float(out) if np.ndim(out) == 0 else out


def sech2_delay(n_atoms: int, gamma_w: float) -> float:
    return math.log(n_atoms) / (gamma_w * n_atoms)


def delay_time_sum(spec: EnsembleSpec, gamma_w: float, n_emitted: int, start_m=None) -> float:
    """Mean emission time of ``n_emitted`` photons, sum of 1/(gamma g_{m,m-1}) over the top n levels.

    The cascade starts at ``start_m`` (default: the fully excited level r) and the
    sum runs over m = start_m - n + 1 .. start_m.
    """
    if gamma_w <= 0:
        raise DomainError(f"gamma_w must be > 0, got {gamma_w}")
    top = spec.r if start_m is None else float(start_m)
    k_top = spec.index_of(top)
    if isinstance(n_emitted, bool) or int(n_emitted) != n_emitted:
        raise DomainError(f"n_emitted must be an integer, got {n_emitted!r}")
    n_emitted = int(n_emitted)
    if not 0 <= n_emitted <= k_top:
        raise DomainError(
            f"n_emitted={n_emitted} out of range 0..{k_top} for a cascade starting at m={format_m(top)}"
        )
    g = ladder_coefficients(spec)[k_top - n_emitted + 1 : k_top + 1]
    return float(np.sum(1.0 / (gamma_w * g)))


@dataclass(frozen=True)
class CriticalSet:
    """Critical atom numbers N*(k) = 4 pi k / |eta_plus - eta_minus|."""

    eta_diff: float
    values: tuple
    nearest_integers: tuple = field(default=())
    nearest_f: tuple = field(default=())


def critical_numbers(couplings: Couplings, k_max: int) -> CriticalSet:
    delta = couplings.eta_diff
    if delta == 0:
        raise NoCriticalNumberError(
            "eta_plus == eta_minus: the modulation factor is identically 1, no critical atom number exists"
        )
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    values, nearest, f_near = [], [], []
    for k in range(1, int(k_max) + 1):
        n_star = 4 * math.pi * k / abs(delta)
        residual = f_modulation_real(n_star, delta)
        if residual >= CRITICAL_CHECK:
            raise DomainError(f"f(N*={n_star}) = {residual:.3g} does not vanish; N* not representable")
        values.append(n_star)
        n_int = max(1, round(n_star))
        nearest.append(n_int)
        f_near.append(f_modulation(n_int, delta))
    return CriticalSet(delta, tuple(values), tuple(nearest), tuple(f_near))


def f_modulation_real(n: float, eta_diff: float) -> float:
    """f evaluated at a real-valued atom number."""
    y = n * eta_diff
    return 16.0 * math.sin(y / 4) ** 2 / (y * y) if y else 1.0


@dataclass(frozen=True)
class StabilizedLevel:
    m: float
    k: int
    residual: float


@dataclass(frozen=True)
class StabilizedStates:
    n_atoms: int
    members: tuple

    @property
    def m_values(self):
        return [s.m for s in self.members]


def stabilized_states(spec: EnsembleSpec, couplings: Couplings, tolerance: float = 1e-12) -> StabilizedStates:
    """Levels whose Stark phase sits on 2 pi k, k >= 1 (zero rate factor C)."""
    if tolerance < 0:
        raise DomainError(f"tolerance must be >= 0, got {tolerance}")
    members = []
    for m, x in zip(spec.m_values, stark_phases(spec, couplings)):
        k = round(x / (2 * math.pi))
        if k < 1:
            continue
        residual = abs(x - 2 * math.pi * k)
        if residual <= tolerance:
            members.append(StabilizedLevel(float(m), int(k), float(residual)))
    return StabilizedStates(spec.n_atoms, tuple(members))


def peak_and_delay(trace: PulseTrace):
    """(peak intensity, peak time, has_delay); a delay is a peak later than one grid step."""
    if len(trace) == 0:
        raise DomainError("empty trace")
    i = int(np.argmax(trace.intensities))
    t = trace.times
    peak_time = float(t[i])
    has_delay = len(trace) > 1 and peak_time > t[0] + (t[1] - t[0])
    return float(trace.intensities[i]), peak_time, bool(has_delay)


def emitted_fraction(spec: EnsembleSpec, trace: PulseTrace) -> float:
    """Share of the initial excitation radiated by the end of the trace."""
    m = spec.m_values
    start = trace.population_history[0] @ m
    end = trace.population_history[-1] @ m
    excitation = start + spec.r
    return 0.0 if excitation <= 0 else float((start - end) / excitation)
