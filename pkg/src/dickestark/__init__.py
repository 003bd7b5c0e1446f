"""Dicke superradiance with Stark interaction against a zero-photon vacuum field."""

__version__ = "0.1.0"

from .algebra import (
    Couplings,
    EnsembleSpec,
    c_factor,
    f_modulation,
    ladder_coefficient,
    operator_function,
)
from .dynamics import diagonal_rhs, evolve_diagonal, evolve_full, full_rhs, w_state_decay
from .ito import (
    ItoExpr,
    SdeCoefficients,
    closed_form_coefficients,
    exponentiate_increment,
    generator,
    ito_mul,
    master_equation_rhs_from_sde,
)
from .observables import (
    critical_numbers,
    delay_time_sum,
    intensity,
    peak_and_delay,
    sech2_reference,
    stabilized_states,
)
from .states import FullState, LadderState, PulseTrace, TimeGrid, fully_excited, semi_excited, w_state

__all__ = [
    "Couplings",
    "EnsembleSpec",
    "FullState",
    "ItoExpr",
    "LadderState",
    "PulseTrace",
    "SdeCoefficients",
    "TimeGrid",
    "c_factor",
    "closed_form_coefficients",
    "critical_numbers",
    "delay_time_sum",
    "diagonal_rhs",
    "evolve_diagonal",
    "evolve_full",
    "exponentiate_increment",
    "f_modulation",
    "full_rhs",
    "fully_excited",
    "generator",
    "intensity",
    "ito_mul",
    "ladder_coefficient",
    "master_equation_rhs_from_sde",
    "operator_function",
    "peak_and_delay",
    "sech2_reference",
    "semi_excited",
    "stabilized_states",
    "w_state",
    "w_state_decay",
]
