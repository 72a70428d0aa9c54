"""Exception hierarchy used across the package."""


class SpinCloneError(Exception):
    """Base class for all package errors."""


class DomainError(SpinCloneError, ValueError):
    """An argument lies outside the domain of the operation."""


class LayoutError(SpinCloneError, ValueError):
    """Sub-register index sets overlap or fail to cover the register."""


class ShapeError(SpinCloneError, ValueError):
    """Operands live on registers of different size."""


class ConfigError(SpinCloneError, ValueError):
    """Invalid protocol configuration (e.g. too few copies)."""


class ModelError(SpinCloneError, ValueError):
    """The two-dimensional reduction is invalid for this configuration."""


class AccuracyError(SpinCloneError, ArithmeticError):
    """An iterative method did not reach the requested tolerance.

    Attributes
    ----------
    residual : float
        Last error estimate reached before giving up.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DegeneracyError(SpinCloneError, ArithmeticError):
    """The ground level of a Hamiltonian is (numerically) degenerate."""

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap
