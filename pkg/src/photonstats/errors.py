"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto its exit-code contract: validation problems exit
with 2, corrupt or unreadable data files with 3, numeric range violations
(overflow guards) with 4.
"""

from __future__ import annotations


class PhotonStatsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PhotonStatsError):
    """Invalid parameter, spec, or config value.

    ``field`` optionally names the offending config/spec field so the CLI
    can emit field-level messages.
    """

    exit_code = 2

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnsupportedCombinationError(ValidationError):
    """Parameter combination with no defined law (e.g. harmonic of a
    multimode source)."""


class OrderingError(ValidationError):
    """Pipeline stage applied out of order (e.g. a transform on an
    already-detected train). Detection is always the last stage."""


class ResolutionError(ValidationError):
    """Numeric grid too coarse or too narrow for the requested operation.

    Carries the bounds the grid must satisfy.
    """

    def __init__(self, message: str, *, required_lo: float,
                 required_hi: float, required_spacing: float):
        super().__init__(message)
        self.required_lo = required_lo
        self.required_hi = required_hi
        self.required_spacing = required_spacing


class MomentsUndefinedError(ValidationError):
    """Moments requested for a family whose moments diverge.

    ``tail_exponent`` carries the analytic Pareto index of the family as
    context for the caller.
    """

    def __init__(self, message: str, *, tail_exponent: float):
        super().__init__(message)
        self.tail_exponent = tail_exponent


class DataFormatError(PhotonStatsError):
    """Corrupt, truncated, or wrong-format data file."""

    exit_code = 3


class NumericRangeError(PhotonStatsError):
    """Computation would overflow or leave the representable range."""

    exit_code = 4
