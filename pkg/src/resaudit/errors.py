"""Exception hierarchy shared across the package."""


class AuditError(Exception):
    """Base class for all errors raised by resaudit."""


class ValidationError(AuditError):
    """Bad user input: malformed data, unknown identifiers, contract violations."""


class DegenerateError(AuditError):
    """A statistic is undefined for this input (zero variance, single-sign runs, ...)."""


class AdapterError(AuditError):
    """An external model adapter failed: launch, protocol, timeout, or bad payload."""

    def __init__(self, message: str, last_message: str | None = None):
        super().__init__(message)
        self.last_message = last_message
