"""Exception hierarchy."""


class FramelipError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(FramelipError, ValueError):
    pass


class NonSymmetric(FramelipError, ValueError):
    pass


class NoConvergence(FramelipError, RuntimeError):
    pass


class IterationLimit(FramelipError, RuntimeError):
    """Raised when an iterative solver stops early; ``best`` holds the last iterate."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class FrameError(FramelipError, ValueError):
    """Invalid frame data (non-finite entries, m < n, zero vectors, ...)."""


class ZeroVectorInFrame(FrameError):
    pass


class ConstructionFailed(FramelipError, RuntimeError):
    pass


class TooManyIndices(FramelipError, ValueError):
    pass


class NotInjective(FramelipError, ValueError):
    pass


class NotPhaseRetrievable(NotInjective):
    pass


class WrongElementCount(FramelipError, ValueError):
    pass


class OutsideDomain(FramelipError, ValueError):
    pass


class ZeroDistance(FramelipError, ValueError):
    pass


class DegenerateDomain(FramelipError, ValueError):
    pass


class NoUpperBound(FramelipError, RuntimeError):
    pass
