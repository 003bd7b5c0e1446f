"""State containers: ladder populations, dense density matrices, time grids, pulse traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import EnsembleSpec
from .errors import DomainError

TRACE_TOL = 1e-9
NEGATIVE_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIGEN_TOL = 1e-8


@dataclass(frozen=True)
class LadderState:
    """Diagonal of the atomic density matrix, p_m for m = -r .. r in basis order."""

    populations: np.ndarray

    def __post_init__(self):
        p = np.array(self.populations, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise DomainError(f"populations must be a 1-d vector of length >= 2, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DomainError("populations must be finite")
        if abs(p.sum() - 1.0) > TRACE_TOL:
            raise DomainError(f"populations must sum to 1 within {TRACE_TOL}, sum is {p.sum()!r}")
        if p.min() < -NEGATIVE_TOL:
            raise DomainError(f"population {p.min()!r} below -{NEGATIVE_TOL}")
        p.setflags(write=False)
        object.__setattr__(self, "populations", p)

    @property
    def dim(self) -> int:
        return self.populations.size

    def check(self, spec: EnsembleSpec) -> "LadderState":
        if self.dim != spec.dim:
            raise DomainError(f"state has {self.dim} levels, ensemble of {spec.n_atoms} atoms needs {spec.dim}")
        return self

    def mean_m(self, spec: EnsembleSpec) -> float:
        return float(self.check(spec).populations @ spec.m_values)


@dataclass(frozen=True)
class FullState:
    """Hermitian, unit-trace, positive density matrix in the Dicke basis."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
            raise DomainError(f"rho must be a square matrix of size >= 2, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise DomainError("rho must be finite")
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > HERMITIAN_TOL:
            raise DomainError(f"rho is not Hermitian (deviation {herm:.3g})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace of rho must be 1 within {TRACE_TOL}, got {tr!r}")
        low = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
        if low < -EIGEN_TOL:
            raise DomainError(f"rho has a negative eigenvalue {low:.3g}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def check(self, spec: EnsembleSpec) -> "FullState":
        if self.dim != spec.dim:
            raise DomainError(f"state has dimension {self.dim}, ensemble of {spec.n_atoms} atoms needs {spec.dim}")
        return self

    @classmethod
    def from_ladder(cls, state: LadderState) -> "FullState":
        return cls(np.diag(np.clip(state.populations, 0.0, None)).astype(complex))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho)).copy()

    def off_diagonal_norm(self) -> float:
        return float(np.max(np.abs(self.rho - np.diag(np.diag(self.rho)))))


@dataclass(frozen=True)
class TimeGrid:
    t_end: float
    output_points: int = 201
    t_start: float = 0.0

    def __post_init__(self):
        if not (self.t_start >= 0 and self.t_end > self.t_start):
            raise DomainError(f"need t_end > t_start >= 0, got t_start={self.t_start}, t_end={self.t_end}")
        if isinstance(self.output_points, bool) or int(self.output_points) != self.output_points:
            raise DomainError(f"output_points must be an integer, got {self.output_points!r}")
        if self.output_points < 2:
            raise DomainError(f"output_points must be >= 2, got {self.output_points}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.output_points))


@dataclass(frozen=True)
class PulseTrace:
    times: np.ndarray
    intensities: np.ndarray
    population_history: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        i = np.asarray(self.intensities, dtype=float)
        p = np.asarray(self.population_history, dtype=float)
        if t.ndim != 1 or i.shape != t.shape or p.ndim != 2 or p.shape[0] != t.size:
            raise DomainError(
                f"inconsistent trace shapes: times {t.shape}, intensities {i.shape}, populations {p.shape}"
            )
        if np.any(i < 0):
            raise DomainError("intensities must be nonnegative")
        for name, arr in (("times", t), ("intensities", i), ("population_history", p)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.times.size

    def trace_drift(self) -> float:
        return float(np.max(np.abs(self.population_history.sum(axis=1) - 1.0), initial=0.0))


def ladder_level(spec: EnsembleSpec, m) -> LadderState:
    """All population in the Dicke level |r, m>."""
    p = np.zeros(spec.dim)
    p[spec.index_of(m)] = 1.0
    return LadderState(p)


def fully_excited(spec: EnsembleSpec) -> LadderState:
    return ladder_level(spec, spec.r)


def semi_excited(spec: EnsembleSpec) -> LadderState:
    """|r, 0>; only exists for an even number of atoms."""
    if spec.n_atoms % 2:
        raise DomainError(f"the semi-excited state |r, 0> needs an even atom count, got {spec.n_atoms}")
    return ladder_level(spec, 0)


def w_state(spec: EnsembleSpec) -> LadderState:
    """Symmetric single excitation, the Dicke vector |r, -r+1>."""
    return ladder_level(spec, -spec.r + 1)


def ground(spec: EnsembleSpec) -> LadderState:
    return ladder_level(spec, -spec.r)
