"""Randomized agreement checks between the Ito-series route and the closed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Couplings, EnsembleSpec
from .dynamics import full_rhs
from .ito import closed_form_coefficients, exponentiate_increment, generator, master_equation_rhs_from_sde
from .output import fmt
from .states import FullState

THRESHOLD = 1e-10
CHI_RANGE = (0.0, 1.0)
ETA_RANGE = (-1.0, 1.0)


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_couplings(rng: np.random.Generator) -> Couplings:
    chi = rng.uniform(*CHI_RANGE)
    eta_plus, eta_minus = rng.uniform(*ETA_RANGE, size=2)
    return Couplings(chi, eta_plus, eta_minus)


@dataclass
class CheckResult:
    n_atoms: int
    trials: int
    coefficient_deviation: float = 0.0
    generator_deviation: float = 0.0
    worst: Couplings | None = None
    worst_value: float = -1.0


def check_ensemble(n_atoms: int, trials: int, rng: np.random.Generator) -> CheckResult:
    spec = EnsembleSpec(n_atoms)
    result = CheckResult(n_atoms, trials)
    for _ in range(trials):
        couplings = random_couplings(rng)
        series = exponentiate_increment(generator(spec, couplings))
        closed = closed_form_coefficients(spec, couplings)
        rho = FullState(random_density_matrix(rng, spec.dim))
        dev_c = series.max_deviation(closed)
        dev_g = float(np.max(np.abs(master_equation_rhs_from_sde(closed, rho) - full_rhs(spec, couplings, rho))))
        result.coefficient_deviation = max(result.coefficient_deviation, dev_c)
        result.generator_deviation = max(result.generator_deviation, dev_g)
        if max(dev_c, dev_g) > result.worst_value:
            result.worst_value = max(dev_c, dev_g)
            result.worst = couplings
    return result


def verify_ito(n_max: int, trials: int, seed: int):
    """Run the checks for N_a = 1..n_max; returns (report text, results, passed)."""
    rng = np.random.default_rng(seed)
    results = [check_ensemble(n, trials, rng) for n in range(1, n_max + 1)] if trials > 0 else []
    lines = [
        f"# verify-ito n_max={n_max} trials={trials} seed={seed} threshold={fmt(THRESHOLD)}",
        "n_atoms,trials,max_dev_coefficients,max_dev_generator",
    ]
    for r in results:
        lines.append(f"{r.n_atoms},{r.trials},{fmt(r.coefficient_deviation)},{fmt(r.generator_deviation)}")
    passed = all(max(r.coefficient_deviation, r.generator_deviation) <= THRESHOLD for r in results)
    return "\n".join(lines) + "\n", results, passed
