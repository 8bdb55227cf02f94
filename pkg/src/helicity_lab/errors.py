"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the domain of the operation."""


class PreconditionViolation(ValueError):
    """The input is well-formed but fails a mathematical precondition."""
