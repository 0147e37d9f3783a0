"""Exception hierarchy shared by every module."""


class PinningError(Exception):
    """Base class for all errors raised by hierpin."""


class InvalidLawError(PinningError, ValueError):
    pass


class ArityError(PinningError, ValueError):
    pass


class DomainError(PinningError, ValueError):
    pass


class BracketError(PinningError):
    pass


class ResourceError(PinningError):
    pass


class NotConvergedError(PinningError):
    """Iteration budget exhausted before either phase was detected.

    ``lower_estimate`` carries the last ``rho_n / s**n`` so callers can still
    use it as a (non-certified) lower estimate.
    """

    def __init__(self, message, lower_estimate=None, levels_used=None):
        super().__init__(message)
        self.lower_estimate = lower_estimate
        self.levels_used = levels_used
