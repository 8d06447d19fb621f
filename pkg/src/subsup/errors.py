class SubsupError(Exception):
    """Base class for library errors."""


class ValidationError(SubsupError, ValueError):
    """Malformed input: bad subset, mismatched ground sets, invalid file."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class GroundSetTooLarge(ValidationError):
    pass


class NumericalError(SubsupError, ArithmeticError):
    """A numerical precondition failed (e.g. a non positive-definite matrix)."""
