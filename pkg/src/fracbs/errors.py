"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to converge or produced non-finite output."""
