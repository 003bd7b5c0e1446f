"""Exception hierarchy shared by all modules."""


class DickeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DickeError, ValueError):
    """An argument lies outside the domain of an operation."""


class NoCriticalNumberError(DomainError):
    """eta_plus == eta_minus: the modulation factor is identically 1."""


class ResonanceError(DomainError):
    """A frequency falls inside the guard band of an intermediate-level pole."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class DegenerateCouplingError(DomainError):
    """The effective two-quantum dipole vanishes while Stark parameters are requested."""


class ConvergenceError(DickeError, RuntimeError):
    """A series did not converge within its term cap."""


class IntegrationError(DickeError, RuntimeError):
    """The adaptive integrator could not continue."""

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class CapacityError(DickeError):
    """The requested ensemble is too large for the dense density-matrix solver."""
