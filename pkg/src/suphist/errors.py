"""Exception types raised across the package."""


class SupportHistError(Exception):
    """Base class for all package errors."""


class NegativeCount(SupportHistError, ValueError):
    """An update would drive a running count below zero (non-strict stream)."""


class DomainViolation(SupportHistError, ValueError):
    """An item lies outside the domain [1..n]."""


class EmptyStream(SupportHistError, ValueError):
    """The stream has total count m = 0, so masses are undefined."""


class BadParams(SupportHistError, ValueError):
    pass


class EmptyPointSet(SupportHistError, ValueError):
    pass


class NegativeDeltaUnsupported(SupportHistError, ValueError):
    """An insertion-only sketch received a deletion."""


class InvalidHHHSet(SupportHistError, ValueError):
    pass


class NonReplayableSource(SupportHistError, ValueError):
    """A multi-pass algorithm was handed a stream that can only be read once."""


class DomainMismatch(SupportHistError, ValueError):
    pass


class ParseError(SupportHistError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
