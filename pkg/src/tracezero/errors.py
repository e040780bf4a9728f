"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (bad shape, wrong trace, ...)."""


class PreconditionError(InvalidInputError):
    """A structural precondition failed: rank comparison, orthogonality, ..."""


class NumericsError(RuntimeError):
    """An internal numerical guarantee was violated (should not happen)."""
