"""Exception taxonomy shared across the package."""


class NumericsError(Exception):
    """Base class for numerical failures."""


class QuadratureConvergenceError(NumericsError):
    """Composite quadrature refinement stalled before reaching its target.

    Carries the last two refinement values so callers can see how far apart
    they were.
    """

    def __init__(self, message, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous


class StepDensityError(NumericsError):
    """Branch continuation samples are too sparse to pick a square root unambiguously."""


class ContourGeometryError(ValueError):
    """No admissible contour exists for the requested pair and margin."""


class DomainError(ValueError):
    """Inputs outside the mathematical domain of an operation."""


class PoleEncountered(ArithmeticError):
    """A family denominator vanished: the solution has a pole there."""
