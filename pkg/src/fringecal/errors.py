"""Exception hierarchy shared across the toolkit.

Every error raised on purpose derives from FringecalError so the CLI can
map failures to stable exit codes: parameter problems exit 2, shape
mismatches exit 3, numeric failures (non-invertible profiles and the
like) exit 4.
"""


class FringecalError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ParameterError(FringecalError):
    """An argument violates a documented precondition."""

    exit_code = 2


class InsufficientDataError(ParameterError):
    """Too few samples for the requested fit."""


class ShapeError(FringecalError):
    """Array or image dimensions do not agree."""

    exit_code = 3


class NumericError(FringecalError):
    """A numeric invariant failed (divergence, wrong orientation, ...)."""

    exit_code = 4


class NonInvertibleProfileError(NumericError):
    """The forward map r + delta_r(r) is not strictly increasing."""
