"""Exception hierarchy shared by all engines."""


class GMahlerError(Exception):
    """Base class for every error raised by this package."""


class UsageError(GMahlerError, ValueError):
    """Bad arguments: mismatched arity, invalid radii, malformed text."""


class DomainError(GMahlerError, ValueError):
    """A point outside the domain of a Laurent polynomial (zero with a negative power)."""


class DegeneracyError(GMahlerError, ValueError):
    """The polynomial does not genuinely depend on the requested variable."""


class NumericalFailure(GMahlerError, ArithmeticError):
    """An iterative method did not converge."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class SingularityDominated(GMahlerError, ArithmeticError):
    """Too many quadrature nodes had to be dropped as singular."""


class ZeroOnContour(GMahlerError, ArithmeticError):
    """The function vanishes (numerically) on the integration contour."""


class NonIntegral(GMahlerError, ArithmeticError):
    """An argument-principle sum did not land near an integer."""


class PreconditionNotMet(GMahlerError, ValueError):
    """A theorem was applied outside the region where its hypotheses hold."""


class MixedRoots(PreconditionNotMet):
    """Roots of a slice polynomial sit on both sides of the test circle."""


class DivergentSeries(GMahlerError, ValueError):
    """The series expansion was requested outside its disc of convergence."""
