"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """A parameter violates a documented precondition."""


class InvalidWordError(ValueError):
    """A symbolic word is inconsistent with the driving rule sequence."""


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed the configured size cap."""
