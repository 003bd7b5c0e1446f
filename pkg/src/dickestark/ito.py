"""Quantum Ito calculus over the increments {dtau, dB, dB+, dLambda}.

An :class:`ItoExpr` is ``c1 * 1 + c_dtau dtau + c_dB dB + c_dBdag dB+ + c_dL dLambda``
with operator-valued coefficients.  Products follow the Hudson-Parthasarathy
table for a vacuum reservoir::

    dL dL = dL,   dL dB+ = dB+,   dB dL = dB,   dB dB+ = dtau

and every other product of increments vanishes.  Exponentiating the one-step
generator with this product yields the coefficients of the evolution-operator
SDE; :func:`closed_form_coefficients` evaluates the same coefficients directly
so the two routes can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Couplings, EnsembleSpec, lowering, raising, stark_phases
from .errors import ConvergenceError, DomainError

SLOTS = ("one", "dtau", "dB", "dBdag", "dLambda")

DEFAULT_TOLERANCE = 1e-14
MAX_TERMS = 200


@dataclass(frozen=True)
class ItoExpr:
    one: np.ndarray
    dtau: np.ndarray
    dB: np.ndarray
    dBdag: np.ndarray
    dLambda: np.ndarray

    def __post_init__(self):
        shapes = set()
        for name in SLOTS:
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise DomainError(f"coefficient {name} must be a square matrix, got shape {arr.shape}")
            shapes.add(arr.shape)
            object.__setattr__(self, name, arr)
        if len(shapes) != 1:
            raise DomainError(f"coefficient dimensions differ: {sorted(shapes)}")

    @classmethod
    def zero(cls, dim: int) -> "ItoExpr":
        z = np.zeros((dim, dim), dtype=complex)
        return cls(z, z, z, z, z)

    @classmethod
    def build(cls, dim: int, **coeffs) -> "ItoExpr":
        unknown = set(coeffs) - set(SLOTS)
        if unknown:
            raise DomainError(f"unknown increment slot(s): {sorted(unknown)}")
        z = np.zeros((dim, dim), dtype=complex)
        return cls(**{name: coeffs.get(name, z) for name in SLOTS})

    @property
    def dim(self) -> int:
        return self.one.shape[0]

    def coefficients(self):
        return tuple(getattr(self, name) for name in SLOTS)

    def max_norm(self) -> float:
        return max(float(np.max(np.abs(c), initial=0.0)) for c in self.coefficients())

    def __add__(self, other: "ItoExpr") -> "ItoExpr":
        _check_dims(self, other)
        return ItoExpr(*(a + b for a, b in zip(self.coefficients(), other.coefficients())))

    def __sub__(self, other: "ItoExpr") -> "ItoExpr":
        _check_dims(self, other)
        return ItoExpr(*(a - b for a, b in zip(self.coefficients(), other.coefficients())))

    def scale(self, factor: complex) -> "ItoExpr":
        return ItoExpr(*(factor * c for c in self.coefficients()))

    def __matmul__(self, other: "ItoExpr") -> "ItoExpr":
        return ito_mul(self, other)


@dataclass(frozen=True)
class SdeCoefficients:
    """dU = (a0 dtau + a_plus dB + a_minus dB+ + a_lambda dLambda) U."""

    a0: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    a_lambda: np.ndarray

    def max_deviation(self, other: "SdeCoefficients") -> float:
        return max(
            float(np.max(np.abs(getattr(self, f) - getattr(other, f))))
            for f in ("a0", "a_plus", "a_minus", "a_lambda")
        )


def _check_dims(lhs: ItoExpr, rhs: ItoExpr):
    if lhs.dim != rhs.dim:
        raise DomainError(f"dimension mismatch: {lhs.dim} vs {rhs.dim}")


def ito_mul(lhs: ItoExpr, rhs: ItoExpr) -> ItoExpr:
    """Product of two Ito expressions; left coefficients stay on the left."""
    _check_dims(lhs, rhs)
    a, b = lhs, rhs
    return ItoExpr(
        one=a.one @ b.one,
        dtau=a.one @ b.dtau + a.dtau @ b.one + a.dB @ b.dBdag,
        dB=a.one @ b.dB + a.dB @ b.one + a.dB @ b.dLambda,
        dBdag=a.one @ b.dBdag + a.dBdag @ b.one + a.dLambda @ b.dBdag,
        dLambda=a.one @ b.dLambda + a.dLambda @ b.one + a.dLambda @ b.dLambda,
    )


def stark_operator(spec: EnsembleSpec, couplings: Couplings) -> np.ndarray:
    """S = eta_plus N_a / 2 + eta_minus R3 as a dense diagonal matrix."""
    return np.diag(stark_phases(spec, couplings)).astype(complex)


def generator(spec: EnsembleSpec, couplings: Couplings) -> ItoExpr:
    """One-step generator -i(chi R+ dB + chi R- dB+ + S dLambda)."""
    chi = couplings.chi
    return ItoExpr.build(
        spec.dim,
        dB=-1j * chi * raising(spec),
        dBdag=-1j * chi * lowering(spec),
        dLambda=-1j * stark_operator(spec, couplings),
    )


def exponentiate_increment(g: ItoExpr, tolerance: float = DEFAULT_TOLERANCE, max_terms: int = MAX_TERMS):
    """Sum exp(G) - 1 = sum_k G^k / k! under the Ito product and read off the SDE coefficients."""
    if tolerance <= 0:
        raise DomainError(f"tolerance must be positive, got {tolerance}")
    if np.any(g.one != 0) or np.any(g.dtau != 0):
        raise DomainError("generator must be a pure increment (zero identity and dtau coefficients)")
    term = g
    total = g
    for k in range(2, max_terms + 1):
        if term.max_norm() < tolerance:
            break
        term = ito_mul(term, g).scale(1.0 / k)
        total = total + term
    else:
        if term.max_norm() >= tolerance:
            raise ConvergenceError(f"Ito exponential did not converge within {max_terms} terms")
    if np.any(total.one != 0):
        raise DomainError("identity slot of exp(G) - 1 is nonzero")
    return SdeCoefficients(a0=total.dtau, a_plus=total.dB, a_minus=total.dBdag, a_lambda=total.dLambda)


# ---------------------------------------------------------------------------
# closed forms, evaluated through complex exponentials

_PHI_SERIES_RADIUS = 0.5
_PHI_SERIES_TERMS = 24


def _phi_series(x, order):
    # sum_{k>=0} (-i x)^k / (k + order)!
    acc = np.zeros_like(x, dtype=complex)
    for k in reversed(range(_PHI_SERIES_TERMS)):
        acc = acc * (-1j * x) + 1.0 / math.factorial(k + order)
    return acc


def phi1(x):
    """(exp(-ix) - 1) / x; -i at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _PHI_SERIES_RADIUS
    safe = np.where(small, 1.0, x)
    return np.where(small, -1j * _phi_series(x, 1), (np.exp(-1j * safe) - 1) / safe)


def phi2(x):
    """(exp(-ix) - 1 + ix) / x**2; -1/2 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _PHI_SERIES_RADIUS
    safe = np.where(small, 1.0, x)
    return np.where(small, -_phi_series(x, 2), (np.exp(-1j * safe) - 1 + 1j * safe) / safe**2)


def closed_form_coefficients(spec: EnsembleSpec, couplings: Couplings) -> SdeCoefficients:
    chi = couplings.chi
    x = stark_phases(spec, couplings)
    rp, rm = raising(spec), lowering(spec)
    p1 = phi1(x)
    return SdeCoefficients(
        a0=chi**2 * rp @ (phi2(x)[:, None] * rm),
        a_plus=chi * rp * p1[None, :],
        a_minus=chi * p1[:, None] * rm,
        a_lambda=np.diag(np.exp(-1j * x) - 1),
    )


def master_equation_rhs_from_sde(coeffs: SdeCoefficients, rho) -> np.ndarray:
    """Vacuum-traced increment A0 rho + rho A0^+ + A- rho A-^+.

    Only dB dB+ has a nonzero vacuum expectation, so the dB+ coefficient is the
    sole jump operator.
    """
    rho = np.asarray(getattr(rho, "rho", rho), dtype=complex)
    if rho.shape != coeffs.a0.shape:
        raise DomainError(f"dimension mismatch: rho {rho.shape} vs coefficients {coeffs.a0.shape}")
    a0, am = coeffs.a0, coeffs.a_minus
    return a0 @ rho + rho @ a0.conj().T + am @ rho @ am.conj().T
