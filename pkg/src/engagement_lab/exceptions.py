"""Exception hierarchy shared by every module."""


class EngagementLabError(Exception):
    """Base class for library errors."""


class ValidationError(EngagementLabError, ValueError):
    """Raised when inputs violate a type invariant or a precondition."""


class InfeasibleManifoldError(ValidationError):
    """No point of a manifold admits participation at the working outside option."""


class NumericalError(EngagementLabError, RuntimeError):
    """A numerical routine could not bracket or converge (e.g. bisection, scan caps)."""


class UnexplainedDisagreementError(EngagementLabError, AssertionError):
    """Utility and engagement maximisers disagree in a way the model rules out."""
