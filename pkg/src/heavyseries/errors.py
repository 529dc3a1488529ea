"""Exception types shared across the package."""


class HeavySeriesError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(HeavySeriesError, ValueError):
    """A parameter is outside its admissible domain."""


class ShapeError(HeavySeriesError, ValueError):
    """Array shapes or index layouts do not match."""


class ConvergenceError(HeavySeriesError, RuntimeError):
    """A numerical routine did not reach its tolerance.

    Carries the achieved error estimate so callers can decide whether the
    result is still usable.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class StateError(HeavySeriesError, RuntimeError):
    """An operation was called on an object missing required state."""
