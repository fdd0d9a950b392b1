"""Exception hierarchy for the radial fractional-Laplacian laboratory."""


class FracLabError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(FracLabError, ValueError):
    """A precondition on an argument was violated."""


class InvalidDataError(FracLabError, ValueError):
    """Input samples contain NaN or otherwise unusable values."""


class NonIntegrableWeightError(InvalidArgumentError):
    """The requested power weight is not integrable near the origin."""


class GridMismatchError(InvalidArgumentError):
    """Operands live on different radial grids."""


class SolverFailureError(FracLabError, RuntimeError):
    """An iterative solver failed to converge; carries diagnostics."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history if history is not None else []


class NumericalInstabilityError(FracLabError, RuntimeError):
    """An iteration produced values outside its invariant region."""


class ConsistencyFailureError(FracLabError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class DegenerateConfigurationError(FracLabError, ValueError):
    """A multi-scale configuration collapsed (e.g. colliding scales)."""


class DegenerateInputError(FracLabError, ValueError):
    """An input vanished after a required projection."""


class InsufficientDataError(FracLabError, ValueError):
    """Not enough data points for the requested fit."""
