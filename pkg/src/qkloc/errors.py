"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class QKLocError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QKLocError, ValueError):
    """Values from incompatible algebra contexts were combined, or a session is malformed."""


class DomainError(QKLocError, ValueError):
    """An argument lies outside the domain of an operation."""


class RootOrderExceeded(QKLocError):
    """A root of unity or fractional exponent is not available for the session's root order."""


class NotInvertible(QKLocError, ZeroDivisionError):
    """A scalar has no inverse in the structured (binomial-denominator) representation."""


class PoleHit(QKLocError, ZeroDivisionError):
    """Evaluation point lies on a pole of the function."""


class NotAPole(QKLocError):
    """No denominator factor vanishes at the requested locus."""


class UnsupportedOrder(QKLocError):
    """The pole at the requested locus is not simple."""


class ExprSyntaxError(QKLocError, ValueError):
    """Malformed expression text; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariable(QKLocError, ValueError):
    """An identifier outside ``q``, ``P``, ``L0 .. LN``."""


class PowerNotInteger(QKLocError, ValueError):
    """The exponent after ``^`` is not a (signed) integer literal."""


class LoweringError(QKLocError, ValueError):
    """A well-formed expression has no value of the requested kind."""
