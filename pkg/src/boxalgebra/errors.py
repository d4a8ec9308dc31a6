"""Exception types shared across the package."""


class BoxAlgebraError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BoxAlgebraError, ValueError):
    """An input violates a contract: domain, shape, or invariant."""


class UndefinedProductError(ValidationError):
    """Product of two model labels that the algebra leaves undefined."""


class NumericError(BoxAlgebraError, ArithmeticError):
    """A numerical procedure failed to meet its tolerance."""


class BracketError(NumericError):
    """A root target lies outside the attainable bracket."""
