"""Exception types shared across the package."""


class LineupLabError(Exception):
    """Base class for all package errors."""


class SchemaError(LineupLabError):
    """An input file is missing required columns or has a malformed header."""


class DataValidationError(LineupLabError):
    """A data row violates a value constraint; carries row context."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ReferenceError_(LineupLabError):
    """A row refers to an entity (player, match) that does not exist."""


class EmptyPanelError(LineupLabError):
    """No observations survived filtering."""


class StaleSampleError(LineupLabError):
    """A posterior sample does not match the panel it is being used with."""


class SamplingError(LineupLabError):
    """The sampler hit a non-finite log-density; names the parameter."""


class InfeasibleError(LineupLabError):
    """No line-up satisfies the active constraints."""


class UndefinedConditionalError(LineupLabError):
    """Conditioning event has zero posterior probability."""
