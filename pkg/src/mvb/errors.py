"""Exception types shared across the package."""


class MvbError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MvbError):
    """Operands have incompatible shapes."""


class SingularMatrix(MvbError):
    """A square matrix expected to be invertible is not."""


class InvalidPartition(MvbError):
    """A family of sets fails to partition its ground set."""


class InvalidInput(MvbError):
    """A structural precondition on user-supplied data fails."""


class ParseError(MvbError):
    """Input bytes are not syntactically valid."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class SchemaError(MvbError):
    """Input is valid JSON but does not match the expected schema."""


class SemanticError(MvbError):
    """Input matches the schema but violates a semantic invariant."""
