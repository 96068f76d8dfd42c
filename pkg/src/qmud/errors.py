"""Exception hierarchy shared by all qmud modules."""


class QmudError(Exception):
    """Base class for every error raised by this package."""


class ResourceError(QmudError):
    """A requested register or operator exceeds the memory guards."""


class ShapeError(QmudError, ValueError):
    """Register sizes or operator dimensions do not fit together."""


class DomainError(QmudError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidityError(DomainError):
    """A bound was requested outside the range where it is proven."""


class ScenarioError(QmudError, ValueError):
    """A scenario file could not be parsed or failed validation."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
