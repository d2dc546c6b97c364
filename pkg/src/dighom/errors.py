"""Exception types shared across the package."""


class DighomError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(DighomError, ValueError):
    """Malformed or inconsistent input: points, specs, maps, JSON documents."""


class CapExceeded(DighomError):
    """A search or enumeration hit its configured cap before finishing.

    Callers that can report a partial outcome catch this and mark the
    result undecided instead of letting it propagate.
    """

    def __init__(self, message, cap_name=None):
        super().__init__(message)
        self.cap_name = cap_name
