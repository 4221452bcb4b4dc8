"""Exception hierarchy shared across the toolkit.

ValidationError covers domain and invariant violations (CLI exit code 1);
DataFormatError covers malformed input files (CLI exit code 2, like other
I/O failures).
"""


class BridgeError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(BridgeError, ValueError):
    """A value or configuration violates a documented invariant."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DataFormatError(BridgeError):
    """An input file exists but cannot be parsed against its schema."""
