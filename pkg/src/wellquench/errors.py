"""Exception types shared across the package."""


class WellQuenchError(Exception):
    """Base class for errors raised by this package."""


class TruncationCapError(WellQuenchError):
    """Requested tolerance needs more modes than the configured hard cap."""


class TruncationInconsistencyError(WellQuenchError):
    """An escape probability came out negative beyond numerical noise.

    Signals that the mode count is too small for the requested time, or a bug.
    """


class QuadratureConvergenceError(WellQuenchError):
    """Adaptive quadrature failed to reach the requested error target."""


class GridMismatchError(WellQuenchError):
    """Two grid-sampled objects do not share a compatible grid."""


class InsufficientSpanError(WellQuenchError):
    """A log-log fit was requested on too few rulers or too narrow a span."""
