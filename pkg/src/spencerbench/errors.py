"""Exception types shared across the package."""


class SpencerbenchError(Exception):
    """Base class for all package errors."""


class MismatchError(SpencerbenchError):
    """Operands belong to different algebras or have incompatible shapes."""


class ValidationError(SpencerbenchError):
    """A structural invariant failed; carries a witness when available."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateInputError(SpencerbenchError):
    """Input violates a non-degeneracy precondition (zero functional, singular form)."""


class FormatError(SpencerbenchError):
    """Malformed JSON or textual input."""
