"""Parameter sets of the published pulse figures (N_a = 8, three field intensities)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

FIELD_INTENSITIES = (0.64, 1.0, 1.44)
FIGURE_ATOMS = 8
BASE_CHI = 0.1

_PI = math.pi


@dataclass(frozen=True)
class FigurePreset:
    name: str
    eta_plus: float
    eta_minus: float
    initial: str
    caption: str


PRESETS = {
    p.name: p
    for p in (
        FigurePreset("2", 0.0, 0.0, "fully_excited", "Wiener dynamics"),
        FigurePreset("3a", _PI / 2 - 0.4, 0.0, "fully_excited", "below first critical value, eta- = 0"),
        FigurePreset("3b", _PI / 2 + 0.4, 0.0, "fully_excited", "above first critical value, eta- = 0"),
        FigurePreset("4a", _PI / 8, _PI / 8, "fully_excited", "below critical value, eta- = pi/8"),
        FigurePreset("4b", _PI / 4 + 0.6, _PI / 4, "fully_excited", "above first critical value, eta- = pi/4"),
        FigurePreset("5a", _PI / 2 - 0.4, 0.0, "semi_excited", "semi-excited, below first critical value"),
        FigurePreset("5b", _PI / 2 + 0.4, 0.0, "semi_excited", "semi-excited, above first critical value"),
        FigurePreset("6a", _PI / 4 + 0.6, _PI / 4, "semi_excited", "semi-excited, below critical value, eta- = pi/4"),
        FigurePreset("6b", _PI / 4 + 1.4, _PI / 4, "semi_excited", "semi-excited, above critical value, eta- = pi/4"),
    )
}


def get_preset(name: str) -> FigurePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown figure preset {name!r}; choose from {', '.join(PRESETS)}") from None
