"""Exception hierarchy shared by all capflow modules."""


class CapflowError(Exception):
    """Base class for every error raised by capflow."""


class DomainError(CapflowError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConeViolation(DomainError):
    """Curvature vector is not in the required Garding cone."""


class PoleSingularity(DomainError):
    """The polar chart degenerates (rho too close to zero)."""


class FormatError(CapflowError, ValueError):
    """A surface, config or CSV file does not follow its format."""


class ValidationError(CapflowError):
    """A geometric precondition (convexity, enclosing cap, ...) failed.

    ``node`` holds the offending grid index when one is known.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NumericalAbort(CapflowError):
    """The flow integrator stopped; ``state`` is the last good state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ConvexityLoss(NumericalAbort):
    pass


class ParabolicityLoss(NumericalAbort):
    pass
