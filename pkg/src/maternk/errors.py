"""Exception and warning types shared across the package."""


class PoleError(ArithmeticError):
    """Argument lies on (or numerically at) a pole of a Gamma factor."""


class NoConvergence(ArithmeticError):
    """A series or continued fraction hit its term cap before the tolerance."""


class RouteDisagreement(ArithmeticError):
    """The two independent oracle routes disagree; the oracle itself is broken."""


class NotPositiveDefinite(ArithmeticError):
    """Cholesky factorization failed even at the largest jitter level."""


class DomainError(ValueError):
    """Input outside the mathematical domain of the operation."""


class ValidationError(ValueError):
    """User-supplied configuration or input file is malformed."""


class CancellationWarning(RuntimeWarning):
    """Branch magnitudes exceed the result by more than the configured factor."""


class StagnationWarning(RuntimeWarning):
    """Adaptive finite-difference refinement stopped reducing its error estimate."""
