"""Exception hierarchy shared by every module of the package."""


class GaborLikeError(Exception):
    """Base class for all errors raised by :mod:`gaborlike`."""


class DimensionError(GaborLikeError, ValueError):
    """Array shapes or dimensions do not agree."""


class CatalogError(GaborLikeError, KeyError):
    """Unknown catalog identifier (map, kernel, window or closed form)."""

    def __init__(self, kind, name, valid):
        self.kind = kind
        self.name = name
        self.valid = tuple(valid)
        super().__init__(f"unknown {kind} {name!r}; valid names: {', '.join(self.valid)}")

    def __str__(self):
        return self.args[0]


class UnsupportedWindowError(GaborLikeError, ValueError):
    """The requested operation has no analytic form for this window."""


class RepresentationError(GaborLikeError, ValueError):
    """A function was supplied in the wrong (old vs new) representation."""


class ConvergenceError(GaborLikeError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    Attributes
    ----------
    value : complex
        Best partial estimate of the integral.
    estimate : float
        Error estimate attached to ``value``.
    axis : int or None
        Axis of an iterated integral on which the failure happened.
    """

    def __init__(self, message, value=complex("nan"), estimate=float("inf"), axis=None):
        self.value = value
        self.estimate = estimate
        self.axis = axis
        super().__init__(message)

    def with_axis(self, axis):
        if self.axis is not None:
            return self
        return ConvergenceError(f"{self.args[0]} (axis {axis})", self.value, self.estimate, axis)
