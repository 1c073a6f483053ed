"""Exception hierarchy shared by all modules."""


class NehariError(Exception):
    """Base class for every error raised by this package."""


class InputError(NehariError, ValueError):
    """Malformed, non-finite or mis-shaped input data."""


class NotPSDError(NehariError, ValueError):
    """Matrix is not positive semidefinite within tolerance."""


class PreconditionError(NehariError):
    """A strong-positivity precondition does not hold."""

    def __init__(self, message, min_eig=None):
        super().__init__(message)
        self.min_eig = min_eig


class IterationBreakdown(PreconditionError):
    """``(I (x) q^2) - A22`` lost strong positivity during iteration."""


class NormalizationError(PreconditionError):
    """``A11`` is not strongly positive, so it has no usable inverse root."""


class ReductionBreakdown(PreconditionError):
    """``I - d22`` is not strongly positive in the kernel reduction."""


class NotApplicableError(NehariError):
    """The requested route does not apply to this instance."""


class StateError(NehariError):
    """Operation called on an object in the wrong state."""
