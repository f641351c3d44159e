"""Exception hierarchy shared by every module of the package."""


class HeunError(Exception):
    """Base class for all package errors."""


class ValidationError(HeunError, ValueError):
    """Parameters or arguments rejected before any computation starts."""


class RiemannViolation(ValidationError):
    pass


class SingularityInInterval(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NonPositiveTol(ValidationError):
    pass


class ExistenceViolated(ValidationError):
    pass


class OutsideRadius(DomainError):
    pass


class OutsideMutualRegion(DomainError):
    pass


class EmptyRegion(ValidationError):
    """The two endpoint series share no usable overlap inside (0, 1)."""


class SolverError(HeunError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy result."""


class NoConvergence(SolverError):
    pass


class BracketFailure(SolverError):
    pass


class DegenerateEigenvalue(SolverError):
    """dW/dlambda vanishes at a root, so the closed-form norm would be zero."""


class InconsistentContinuation(SolverError):
    pass


class InvarianceViolation(SolverError):
    pass


class NonPositiveNorm(SolverError):
    pass


class IntegratorFailure(SolverError):
    pass


class ToleranceNotMet(SolverError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error
