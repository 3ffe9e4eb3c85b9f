"""Exception types shared by the pipeline."""


class ThueFamError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ThueFamError, ValueError):
    """A caller violated a documented precondition."""


class InsufficientPrecision(ThueFamError):
    """A certified decision could not be made at the working precision.

    ``extra_bits`` is a rough estimate of how many more bits would help,
    or ``None`` if no estimate is available.
    """

    def __init__(self, message="insufficient precision", extra_bits=None):
        super().__init__(message)
        self.extra_bits = extra_bits


class PrecisionCapExceeded(ThueFamError):
    """Precision doubling reached the configured cap without success."""


class IntegrityError(ThueFamError):
    """A proven envelope was violated; this indicates a bug."""


class ReductionFailed(ThueFamError):
    """No usable convergent was found for a Baker-Davenport reduction."""


class GateFailed(ThueFamError):
    """The LLL lower-bound gate c^2 > T^2 + S did not hold."""
