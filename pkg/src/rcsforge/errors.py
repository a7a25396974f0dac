"""Exception types shared across the package."""


class RcsForgeError(Exception):
    """Base class for all rcsforge errors."""


class DomainError(RcsForgeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(RcsForgeError, ValueError):
    """The operation is not defined in the requested dimension regime."""


class CapacityError(RcsForgeError, ValueError):
    """The requested system size exceeds a configured capacity cap."""
