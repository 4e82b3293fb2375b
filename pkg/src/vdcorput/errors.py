"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceCapError(RuntimeError):
    """A request exceeds a configured size cap."""


class InvariantError(AssertionError):
    """A proved inequality or structural invariant was observed to fail."""
