"""Exception types shared across the library."""


class GkSecrecyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(GkSecrecyError):
    """An argument violates a documented precondition."""


class InternalConsistencyError(GkSecrecyError):
    """A model invariant failed; signals a coefficient bug, never rescaled away."""


class EvaluationError(GkSecrecyError):
    """A term of an analytic sum became non-finite during evaluation."""


class NumericalError(GkSecrecyError):
    """A result is numerically meaningless (0/0 guard, clamp violation)."""


class UnsupportedCaseError(GkSecrecyError):
    """The requested operation is outside the supported parameter domain."""


class NonIntegerOrderError(UnsupportedCaseError):
    """Closed-form asymptote needs an integer diversity order; use the quadrature path."""


class ConvergenceError(GkSecrecyError):
    """Adaptive integration did not meet its tolerance.

    Carries the best available estimate and the corresponding error bound.
    """

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
