"""Exception hierarchy shared by all flatdisc modules."""


class FlatdiscError(Exception):
    """Base class for all library errors."""


class ArgumentError(FlatdiscError, ValueError):
    """Invalid argument (bad alpha, empty chain list, malformed matrix...)."""


class DomainError(FlatdiscError):
    """A point fell outside the validity domain of a map or system.

    The offending point is kept on ``point`` so callers can report it.
    """

    def __init__(self, message, point=None, time=None):
        super().__init__(message)
        self.point = point
        self.time = time


class ChartError(DomainError):
    """A point lies outside the image of a coordinate chart."""


class SingularityError(DomainError):
    """A Jacobian or feedback matrix is (numerically) singular."""


class StepsizeError(FlatdiscError, ValueError):
    """The implicit linear system for a given step size is singular."""


class ConvergenceError(FlatdiscError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
