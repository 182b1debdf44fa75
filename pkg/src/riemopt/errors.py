"""Exception types shared across the package."""


class RiemoptError(Exception):
    """Base class for all package errors."""


class DimensionError(RiemoptError, ValueError):
    """Operands have incompatible or invalid shapes."""


class ParameterError(RiemoptError, ValueError):
    """A metric or solver parameter is out of its admissible range."""


class NumericalError(RiemoptError, ArithmeticError):
    """A factorization or matrix function could not be computed reliably."""


class IllPosedError(NumericalError):
    """A structured linear solve has (near-)vanishing divisors."""


class SolverError(RiemoptError, RuntimeError):
    """An iterative solve failed to converge.

    Carries the last relative residual in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StagnationError(SolverError):
    """A line search underflowed; ``iterate`` holds the last point."""

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate


class InvariantError(RiemoptError, AssertionError):
    """A manifold point/tangent invariant was violated (diagnostics mode)."""


class ConfigError(RiemoptError, ValueError):
    """An experiment configuration file is malformed or inconsistent."""
