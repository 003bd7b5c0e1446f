"""Finite su(2) Dicke representation and the non-Wiener rate factors.

Basis convention: index ``k = 0 .. 2r`` holds the Dicke vector ``|r, m>`` with
``m = -r + k``, so index 0 is the ground state and index ``dim - 1`` the fully
excited state.  Half-integer ``m`` (odd atom counts) is supported.

The Stark phase of a ladder level is ``x_m = eta_plus * N_a / 2 + eta_minus * m``
and every scalar function below is evaluated at that phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

# Below this |x| the cosine-type functions switch to their Taylor series.
SERIES_THRESHOLD = 1e-4
# x - sin(x) loses ~eps/x relative accuracy, so its series branch extends further.
SINE_RESIDUAL_THRESHOLD = 1e-1

OPERATOR_SELECTORS = ("a0", "as", "a_plus", "a_minus", "A_lambda_arg")


@dataclass(frozen=True)
class EnsembleSpec:
    """N_a identical two-level atoms in the maximal pseudo-spin sector r = N_a/2."""

    n_atoms: int

    def __post_init__(self):
        n = self.n_atoms
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise DomainError(f"n_atoms must be an integer, got {n!r}")
        if n < 1:
            raise DomainError(f"n_atoms must be >= 1, got {n}")
        object.__setattr__(self, "n_atoms", int(n))

    @property
    def r(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    @property
    def m_values(self) -> np.ndarray:
        """Ladder indices -r, -r+1, ..., r in basis order."""
        return np.arange(self.dim) - self.r

    def index_of(self, m) -> int:
        """Basis index of ladder level ``m``; raises DomainError when m is off the ladder."""
        k = float(m) + self.r
        kr = round(k)
        if abs(k - kr) > 1e-9 or not 0 <= kr < self.dim:
            raise DomainError(
                f"ladder index m={m} is not one of -r..r in unit steps (r={format_m(self.r)})"
            )
        return int(kr)

    def label(self, k: int) -> str:
        return format_m(self.m_values[k])


def format_m(m) -> str:
    """Render a ladder index exactly: integers plainly, half-integers as p/2."""
    return str(Fraction(float(m)).limit_denominator(2))


@dataclass(frozen=True)
class Couplings:
    """Dimensionless Raman coupling, Stark parameters and geometric factor."""

    chi: float
    eta_plus: float = 0.0
    eta_minus: float = 0.0
    q: float = 1.0

    def __post_init__(self):
        for name in ("chi", "eta_plus", "eta_minus", "q"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.chi < 0:
            raise DomainError(f"chi must be >= 0, got {self.chi}")
        if self.q <= 0:
            raise DomainError(f"q must be > 0, got {self.q}")

    @property
    def outside_validity(self) -> bool:
        """True when the ordering |eta| << chi << 1 assumed by the master equation fails.

        Advisory only; the figure presets deliberately run with eta ~ pi/8.
        """
        eta = max(abs(self.eta_plus), abs(self.eta_minus))
        return not (eta < self.chi < 1.0)

    @property
    def eta_diff(self) -> float:
        return self.eta_plus - self.eta_minus

    def scaled(self, field_intensity: float) -> "Couplings":
        """Couplings at classical-field intensity ``s``: chi**2 -> s * chi**2."""
        if field_intensity < 0:
            raise DomainError(f"field intensity must be >= 0, got {field_intensity}")
        return Couplings(self.chi * math.sqrt(field_intensity), self.eta_plus, self.eta_minus, self.q)


# ---------------------------------------------------------------------------
# scalar functions of the Stark phase (vectorized)


def _piecewise(x, threshold, series, direct):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < threshold
    safe = np.where(small, 1.0, x)
    out = np.where(small, series(x), direct(safe))
    return out[()] if out.ndim == 0 else out


def _horner(x2, coeffs):
    acc = np.zeros_like(x2)
    for c in reversed(coeffs):
        acc = acc * x2 + c
    return acc


_C_SERIES = [(-1) ** k / math.factorial(2 * k + 2) for k in range(6)]
_SINC_SERIES = [(-1) ** k / math.factorial(2 * k + 1) for k in range(6)]
_RESID_SERIES = [(-1) ** k / math.factorial(2 * k + 3) for k in range(6)]


def c_function(x):
    """(1 - cos x) / x**2, with limit 1/2 at x = 0."""
    return _piecewise(
        x,
        SERIES_THRESHOLD,
        lambda x: _horner(x * x, _C_SERIES),
        lambda x: 2.0 * np.sin(0.5 * x) ** 2 / (x * x),
    )


def _sinc(x):
    return _piecewise(x, SERIES_THRESHOLD, lambda x: _horner(x * x, _SINC_SERIES), lambda x: np.sin(x) / x)


def _sine_residual(x):
    # (x - sin x) / x**2
    return _piecewise(
        x,
        SINE_RESIDUAL_THRESHOLD,
        lambda x: x * _horner(x * x, _RESID_SERIES),
        lambda x: (x - np.sin(x)) / (x * x),
    )


def nonwiener_a0(x):
    """2 (1 - cos x) / x**2."""
    return 2.0 * c_function(x)


def nonwiener_as(x):
    """2 (x - sin x) / x**2."""
    return 2.0 * _sine_residual(x)


def nonwiener_a_plus(x):
    """(cos x - 1)/x + i sin(x)/x."""
    x = np.asarray(x, dtype=float)
    return -x * c_function(x) + 1j * _sinc(x)


def nonwiener_a_minus(x):
    """(cos x - 1)/x - i sin(x)/x."""
    x = np.asarray(x, dtype=float)
    return -x * c_function(x) - 1j * _sinc(x)


# ---------------------------------------------------------------------------
# ladder quantities


def stark_argument(spec: EnsembleSpec, couplings: Couplings, m):
    """x_m = eta_plus * N_a / 2 + eta_minus * m."""
    return couplings.eta_plus * spec.n_atoms / 2 + couplings.eta_minus * np.asarray(m, dtype=float)


def stark_phases(spec: EnsembleSpec, couplings: Couplings) -> np.ndarray:
    """x_m for every ladder level, in basis order."""
    return stark_argument(spec, couplings, spec.m_values)


def ladder_coefficient(spec: EnsembleSpec, m, *, strict: bool = True) -> float:
    """g_{m,m-1} = (r + m)(r - m + 1) = <m|R+|m-1><m-1|R-|m>.

    With ``strict=False`` the bottom level m = -r is accepted and gives 0.
    """
    spec.index_of(m)
    r = spec.r
    m = float(m)
    if strict and m - 1 < -r - 1e-9:
        raise DomainError(f"no downward transition from m={format_m(m)} (bottom of the ladder)")
    return (r + m) * (r - m + 1)


def ladder_coefficients(spec: EnsembleSpec) -> np.ndarray:
    """g_{m,m-1} for every level in basis order; the ground entry is 0."""
    m = spec.m_values
    return (spec.r + m) * (spec.r - m + 1)


def c_factor(spec: EnsembleSpec, couplings: Couplings, m) -> float:
    """C_m = (1 - cos x_m) / x_m**2."""
    spec.index_of(m)
    return float(c_function(stark_argument(spec, couplings, m)))


def f_modulation(n_atoms: int, eta_diff: float) -> float:
    """Modulation of the W-state decay rate, 8 (1 - cos(N d / 2)) / (N d)**2; 1 at d = 0."""
    if n_atoms < 1:
        raise DomainError(f"n_atoms must be >= 1, got {n_atoms}")
    y = n_atoms * eta_diff
    if abs(y) < 2 * SERIES_THRESHOLD:
        # 1 - y^2/48 + y^4/5760 - ...
        z = y * y / 4
        return float(2 * _horner(np.asarray(z), _C_SERIES))
    return 16.0 * math.sin(y / 4) ** 2 / (y * y)


def operator_function(spec: EnsembleSpec, couplings: Couplings, which: str) -> np.ndarray:
    """Diagonal matrix of a non-Wiener function of the Stark operator.

    ``which`` is one of ``a0``, ``as``, ``a_plus``, ``a_minus`` or ``A_lambda_arg``
    (the Stark operator itself, eta_plus N_a/2 + eta_minus R3).
    """
    funcs = {
        "a0": nonwiener_a0,
        "as": nonwiener_as,
        "a_plus": nonwiener_a_plus,
        "a_minus": nonwiener_a_minus,
        "A_lambda_arg": lambda x: x,
    }
    if which not in funcs:
        raise ValueError(f"unknown operator function {which!r}; expected one of {OPERATOR_SELECTORS}")
    values = np.asarray(funcs[which](stark_phases(spec, couplings)), dtype=complex)
    return np.diag(values)


# ---------------------------------------------------------------------------
# collective operators


def raising(spec: EnsembleSpec) -> np.ndarray:
    """R+ with R+|r,m> = sqrt((r-m)(r+m+1)) |r,m+1>."""
    m = spec.m_values[:-1]
    r = spec.r
    return np.diag(np.sqrt((r - m) * (r + m + 1)), k=-1).astype(complex)


def lowering(spec: EnsembleSpec) -> np.ndarray:
    """R- = (R+)^dagger."""
    return raising(spec).T.copy()


def inversion(spec: EnsembleSpec) -> np.ndarray:
    """R3 = diag(m)."""
    return np.diag(spec.m_values).astype(complex)
