"""Optical-resonance parameters from atomic level data (Gaussian units).

``energies`` are level energies, ``dipoles`` the Hermitian dipole matrix
d_kj = <E_k|d|E_j> with zero diagonal.  Transition frequencies are
omega_kj = (E_k - E_j) / hbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Couplings
from .errors import DegenerateCouplingError, DomainError, ResonanceError

HBAR_CGS = 1.054571817e-27  # erg s
C_CGS = 2.99792458e10  # cm / s
GEOMETRY_FACTOR = math.sqrt(3.0)
GUARD_BAND = 1e-6


@dataclass(frozen=True)
class LevelScheme:
    energies: np.ndarray
    dipoles: np.ndarray
    field_amplitude: float
    omega_gamma: float
    omega_cl: float
    ground: int = 0
    excited: int = 1
    hbar: float = HBAR_CGS
    c: float = C_CGS
    mu: float = GEOMETRY_FACTOR
    guard_band: float = GUARD_BAND

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        d = np.asarray(self.dipoles, dtype=complex)
        n = e.size
        if e.ndim != 1 or n < 2:
            raise DomainError("energies must be a 1-d array with at least two levels")
        if d.shape != (n, n):
            raise DomainError(f"dipoles must have shape {(n, n)}, got {d.shape}")
        if np.any(np.diag(d) != 0):
            raise DomainError("diagonal dipole elements must vanish (levels of definite parity)")
        if not np.allclose(d, d.conj().T, rtol=0, atol=1e-14 * max(1.0, np.max(np.abs(d)))):
            raise DomainError("dipole matrix must be Hermitian")
        if not (0 <= self.ground < n and 0 <= self.excited < n and self.ground != self.excited):
            raise DomainError(f"working levels ({self.ground}, {self.excited}) invalid for {n} levels")
        if self.omega_gamma <= 0 or self.hbar <= 0 or self.c <= 0 or self.mu <= 0:
            raise DomainError("omega_gamma, hbar, c and mu must be positive")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "dipoles", d)

    @property
    def n_levels(self) -> int:
        return self.energies.size

    def omega(self, k: int, j: int) -> float:
        return (self.energies[k] - self.energies[j]) / self.hbar


def _guard(scheme: LevelScheme, denom: float, level: int, what: str):
    if abs(denom) < scheme.guard_band * scheme.omega_gamma:
        raise ResonanceError(f"{what}: frequency within the guard band of the pole at level {level}", level=level)


def pi_nm(scheme: LevelScheme, n: int, m: int, omega: float) -> complex:
    """Pi_nm(w) = sum_j d_nj d_jm / hbar * (1/(w_jn + w) + 1/(w_jm - w))."""
    d = scheme.dipoles
    total = 0j
    for j in range(scheme.n_levels):
        if j in (n, m):
            continue
        num = d[n, j] * d[j, m]
        if num == 0:
            continue
        a = scheme.omega(j, n) + omega
        b = scheme.omega(j, m) - omega
        _guard(scheme, a, j, f"Pi_{n}{m}")
        _guard(scheme, b, j, f"Pi_{n}{m}")
        total += num / scheme.hbar * (1 / a + 1 / b)
    return total


def pi_k(scheme: LevelScheme, k: int, omega: float) -> complex:
    """Pi_k(w) = sum_j |d_kj|^2 / hbar * (1/(w_kj + w) + 1/(w_kj - w))."""
    d = scheme.dipoles
    total = 0j
    for j in range(scheme.n_levels):
        if j == k:
            continue
        num = abs(d[k, j]) ** 2
        if num == 0:
            continue
        w = scheme.omega(k, j)
        _guard(scheme, w + omega, j, f"Pi_{k}")
        _guard(scheme, w - omega, j, f"Pi_{k}")
        total += num / scheme.hbar * (1 / (w + omega) + 1 / (w - omega))
    return complex(total)


@dataclass(frozen=True)
class PiParameters:
    pi_21: complex
    pi_1: complex
    pi_2: complex


def pi_parameters(scheme: LevelScheme, omega: float) -> PiParameters:
    """Pi_21, Pi_1, Pi_2 at frequency ``omega`` for the working pair (ground=1, excited=2)."""
    g, e = scheme.ground, scheme.excited
    return PiParameters(pi_nm(scheme, e, g, omega), pi_k(scheme, g, omega), pi_k(scheme, e, omega))


def effective_dipole(scheme: LevelScheme) -> float:
    """D_21 = (Pi_21(w_Gamma) + Pi_21(-w_cl)) E / 2, taken real."""
    g, e = scheme.ground, scheme.excited
    d21 = 0.5 * (pi_nm(scheme, e, g, scheme.omega_gamma) + pi_nm(scheme, e, g, -scheme.omega_cl))
    return float(np.real(d21 * np.conj(scheme.field_amplitude)))


def dimensionless_couplings(scheme: LevelScheme, *, with_stark: bool = True, q: float = 1.0) -> Couplings:
    """chi and eta_+- at the Markov point nu = nu' = 1.

    ``with_stark=False`` returns eta_+- = 0; otherwise a vanishing D_21 raises
    :class:`DegenerateCouplingError` because eta is defined relative to D_21^2.
    """
    hbar, w = scheme.hbar, scheme.omega_gamma
    d21 = effective_dipole(scheme)
    chi = math.sqrt(2) * w * d21 / (scheme.mu * scheme.c**1.5 * math.sqrt(hbar))
    if not with_stark:
        return Couplings(abs(chi), 0.0, 0.0, q)
    if d21 == 0:
        raise DegenerateCouplingError("effective dipole D_21 vanishes; the Stark parameters are undefined")
    p1 = np.real(pi_k(scheme, scheme.ground, w))
    p2 = np.real(pi_k(scheme, scheme.excited, w))
    norm = d21**2 / (hbar * w)
    eta_plus = chi**2 * (p2 + p1) / norm
    eta_minus = chi**2 * (p2 - p1) / norm
    return Couplings(abs(chi), float(eta_plus), float(eta_minus), q)
