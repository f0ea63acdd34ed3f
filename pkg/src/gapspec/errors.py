"""Exception hierarchy shared by all gapspec modules."""


class GapspecError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GapspecError):
    """Invalid input: bad parameters, malformed descriptors, out-of-range knobs."""


class DomainError(GapspecError):
    """Evaluation point lies outside the mathematical domain of the operation."""


class SingularityError(GapspecError):
    """Evaluation point coincides (numerically) with a singularity."""


class AccuracyError(GapspecError):
    """Quadrature or discretization failed to reach the requested tolerance.

    Carries the best available estimate and an error bound when known.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class SolverError(GapspecError):
    """Iterative solver failed to converge; carries the last residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ResourceError(GapspecError):
    """Requested construction would exceed a configured resource cap."""
