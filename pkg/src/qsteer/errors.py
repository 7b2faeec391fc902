"""Exception hierarchy shared by every qsteer module."""


class QsteerError(Exception):
    """Base class for all errors raised by qsteer."""


class DomainError(QsteerError, ValueError):
    """A scalar parameter lies outside its allowed range."""


class DimensionError(QsteerError, ValueError):
    """Matrix dimensions or subsystem labels are inconsistent."""


class InvalidStateError(QsteerError, ValueError):
    """A matrix is not a valid density operator."""


class NotXFormError(QsteerError, ValueError):
    """A two-qubit state has entries outside the X pattern."""


class NonHermitianError(QsteerError, ValueError):
    """An observable is not Hermitian."""


class NotTracePreservingError(QsteerError, ValueError):
    """A set of Kraus operators violates the closure relation."""


class ZeroProbabilityOutcome(QsteerError):
    """A measurement outcome has (numerically) zero probability."""


class ConfigError(QsteerError, ValueError):
    """A sweep configuration or preset identifier is invalid."""
