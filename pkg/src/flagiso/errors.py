"""Common exception types."""


class FlagisoError(Exception):
    """Base class for all library errors."""


class ValidationError(FlagisoError, ValueError):
    """Malformed or semantically invalid input data."""


class ResourceLimitError(FlagisoError, RuntimeError):
    """An enumeration would exceed the configured resource bounds."""
