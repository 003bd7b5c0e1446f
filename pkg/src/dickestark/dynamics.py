"""Time evolution on the Dicke ladder.

Two generators are provided.  :func:`diagonal_rhs` is the population cascade in
which level m decays to m-1 at rate ``2 chi^2 g_{m,m-1} C_{m-1}``.
:func:`full_rhs` is the non-Wiener master equation acting on a dense density
matrix.  On Dicke-diagonal states the two coincide because ``a0 = 2 C``.
"""

from __future__ import annotations

import numpy as np

from . import integrate as _integrate
from .algebra import (
    Couplings,
    EnsembleSpec,
    c_function,
    ladder_coefficients,
    lowering,
    nonwiener_a0,
    nonwiener_a_minus,
    nonwiener_a_plus,
    nonwiener_as,
    raising,
    stark_argument,
    stark_phases,
)
from .errors import CapacityError, DomainError, IntegrationError
from .observables import intensity
from .states import NEGATIVE_TOL, TRACE_TOL, FullState, LadderState, PulseTrace, TimeGrid

FULL_MAX_ATOMS = 64
# Tolerance scales tried in turn when a population undershoots the clamp window.
REFINEMENTS = (1.0, 1e-2, 1e-4)


def decay_rates(spec: EnsembleSpec, couplings: Couplings) -> np.ndarray:
    """Rate of the transition m -> m-1 for every level m (0 for the ground level)."""
    m = spec.m_values
    c_below = c_function(stark_argument(spec, couplings, m - 1))
    return 2.0 * couplings.chi**2 * ladder_coefficients(spec) * c_below


def _cascade(rates, p):
    flow = rates * p
    dp = -flow
    dp[:-1] += flow[1:]
    return dp


def diagonal_rhs(spec: EnsembleSpec, couplings: Couplings, state: LadderState) -> np.ndarray:
    """dp_m/dtau = -w_m p_m + w_{m+1} p_{m+1} with w_m = 2 chi^2 g_{m,m-1} C_{m-1}."""
    if not isinstance(state, LadderState):
        state = LadderState(state)
    state.check(spec)
    return _cascade(decay_rates(spec, couplings), state.populations.copy())


class _Undershoot(IntegrationError):
    pass


def _clamped(history):
    history = np.where((history < 0) & (history >= -NEGATIVE_TOL), 0.0, history)
    low = history.min()
    if low < -NEGATIVE_TOL:
        raise _Undershoot(f"population fell to {low:.3g} even at the tightest tolerances")
    drift = np.max(np.abs(history.sum(axis=1) - 1.0))
    if drift > TRACE_TOL:
        raise IntegrationError(f"trace drifted by {drift:.3g}")
    return history


def _refined(solve, populations):
    """Solve, retrying at tighter tolerances while a population undershoots; returns (history, raw)."""
    for i, scale in enumerate(REFINEMENTS):
        raw = solve(scale)
        try:
            return _clamped(populations(raw)), raw
        except _Undershoot:
            if i == len(REFINEMENTS) - 1:
                raise


def evolve_diagonal(
    spec: EnsembleSpec,
    couplings: Couplings,
    initial: LadderState,
    grid: TimeGrid,
    *,
    rtol: float = _integrate.RTOL,
    atol: float = _integrate.ATOL,
) -> PulseTrace:
    initial.check(spec)
    rates = decay_rates(spec, couplings)
    times = grid.times

    def solve(scale):
        return _integrate.integrate(
            lambda t, p: _cascade(rates, p), initial.populations, times, rtol=rtol * scale, atol=atol * scale
        )

    history, _ = _refined(solve, lambda h: h)
    intensities = np.array([intensity(spec, couplings, row) for row in history])
    return PulseTrace(times, np.clip(intensities, 0.0, None), history)


class _FullGenerator:
    """Precomputed operator products of the non-Wiener master equation."""

    def __init__(self, spec: EnsembleSpec, couplings: Couplings):
        x = stark_phases(spec, couplings)
        rp, rm = raising(spec), lowering(spec)
        chi2 = couplings.chi**2
        a0, a_s = nonwiener_a0(x), nonwiener_as(x)
        self.jump = nonwiener_a_minus(x)[:, None] * rm
        self.jump_adj = rp * nonwiener_a_plus(x)[None, :]
        self.left = rp @ ((a0 - 1j * a_s)[:, None] * rm)
        self.right = rp @ ((a0 + 1j * a_s)[:, None] * rm)
        self.chi2 = chi2

    def __call__(self, rho):
        c = self.chi2
        return c * (self.jump @ rho @ self.jump_adj) - 0.5 * c * (self.left @ rho + rho @ self.right)


def full_rhs(spec: EnsembleSpec, couplings: Couplings, state: FullState) -> np.ndarray:
    """Right-hand side of the non-Wiener master equation for a dense density matrix."""
    if not isinstance(state, FullState):
        state = FullState(state)
    state.check(spec)
    return _FullGenerator(spec, couplings)(state.rho)


def _hermitian(rho):
    return 0.5 * (rho + rho.conj().T)


def evolve_full(
    spec: EnsembleSpec,
    couplings: Couplings,
    initial: FullState,
    grid: TimeGrid,
    *,
    max_atoms: int = FULL_MAX_ATOMS,
    rtol: float = _integrate.RTOL,
    atol: float = _integrate.ATOL,
):
    """Integrate the dense master equation; returns ``(states, trace)``."""
    if spec.n_atoms > max_atoms:
        raise CapacityError(
            f"{spec.n_atoms} atoms exceeds the dense-solver cap of {max_atoms}; "
            "use evolve_diagonal for Dicke-diagonal initial states"
        )
    if not isinstance(initial, FullState):
        initial = FullState(initial)
    initial.check(spec)
    gen = _FullGenerator(spec, couplings)
    times = grid.times

    def solve(scale):
        return _integrate.integrate(
            lambda t, rho: gen(rho), initial.rho, times, rtol=rtol * scale, atol=atol * scale, post_step=_hermitian
        )

    history, rhos = _refined(solve, lambda r: np.real(np.einsum("tii->ti", r)))
    states = []
    for t, rho in zip(times, rhos):
        try:
            states.append(FullState(rho))
        except DomainError as exc:
            raise IntegrationError(f"density matrix left the state space at tau={t}: {exc}", tau=t) from exc
    intensities = np.array([intensity(spec, couplings, row) for row in history])
    return states, PulseTrace(times, np.clip(intensities, 0.0, None), history)


def w_state_decay(spec: EnsembleSpec, couplings: Couplings, tau):
    """Survival probability of |r, -r+1>: exp(-4 chi^2 r C(r (eta+ - eta-)) tau)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    r = spec.r
    rate = 4.0 * couplings.chi**2 * r * c_function(r * couplings.eta_diff)
    out = np.exp(-rate * tau)
    return float(out) if out.ndim == 0 else out
