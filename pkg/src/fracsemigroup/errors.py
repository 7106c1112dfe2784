"""Exception hierarchy shared by all modules."""


class FracSemigroupError(Exception):
    """Base class."""


class StructuralError(FracSemigroupError, ValueError):
    """Incompatible grids, bad shapes, non-finite samples."""


class DomainError(FracSemigroupError, ValueError):
    """Parameters outside the mathematical domain of an operation."""


class NumericalError(FracSemigroupError, RuntimeError):
    """An iterative or quadrature procedure failed to converge.

    ``diagnostics`` carries whatever the failing routine knew (brackets,
    achieved bounds, offending term index).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class InvariantViolation(FracSemigroupError, RuntimeError):
    """A property that must hold by construction was observed to fail."""
