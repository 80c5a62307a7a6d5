"""Exception types raised by lpvdd."""


class LpvddError(Exception):
    """Base class for all package errors."""


class DimensionError(LpvddError, ValueError):
    """Signal or matrix dimensions do not agree."""


class AlignmentError(LpvddError, ValueError):
    """Two signals that must share a time axis have different lengths or start indices."""


class DepthError(LpvddError, ValueError):
    """Requested Hankel depth exceeds the available data length."""


class InsufficientWindowError(LpvddError, ValueError):
    """A window is shorter than the lag needed to pin down the state."""


class InconsistentWindowError(LpvddError, ValueError):
    """A window does not satisfy the model equations.

    The measured residual is kept on ``residual``.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = float(residual)


class InfeasibleError(LpvddError, ValueError):
    """Equality constraints of a data-driven problem cannot be met."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = float(residual)
