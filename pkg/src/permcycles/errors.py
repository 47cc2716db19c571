"""Exception hierarchy shared by the library and the CLI exit-code table."""


class PermCyclesError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ModelParseError(PermCyclesError, ValueError):
    """Malformed or inconsistent model specification."""

    exit_code = 2


class DomainError(PermCyclesError, ValueError):
    """Argument outside the domain of an operation."""

    exit_code = 3


class SizeLimitError(DomainError):
    """Requested size exceeds a configured computational cap."""


class ModelSupportError(DomainError):
    """The model assigns zero weight to every admissible configuration."""


class ConfigurationError(DomainError):
    """The model violates a standing assumption of an asymptotic operation."""


class UnsupportedRegimeError(PermCyclesError):
    """No closed-form law is available for the model's regime and profile."""

    exit_code = 4


class ValidationFailure(PermCyclesError):
    """A cross-check of the validation suite failed."""

    exit_code = 5
