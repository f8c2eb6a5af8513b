"""Exceptions raised by cartier_lab."""

from __future__ import annotations


class CartierLabError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(CartierLabError, ValueError):
    pass


class InvalidArgument(CartierLabError, ValueError):
    """An index, length or option outside the operation's domain."""


class RingSpecError(CartierLabError, ValueError):
    pass


class SpecMismatch(CartierLabError, ValueError):
    pass


class ArityMismatch(CartierLabError, ValueError):
    pass


class ExpressionSyntaxError(CartierLabError, ValueError):
    pass


class OddIndex(CartierLabError, ValueError):
    pass


class AlgebraMismatch(CartierLabError, ValueError):
    pass


class VBoundTooSmall(CartierLabError, ValueError):
    pass


class TruncationTooShort(CartierLabError, ValueError):
    pass


class CeilingExceeded(CartierLabError, ValueError):
    pass


class NonzeroConstantTerm(CartierLabError, ArithmeticError):
    pass


class NotAUnit(CartierLabError, ArithmeticError):
    pass


class NonUnitConstantTerm(CartierLabError, ArithmeticError):
    pass


class NotReversible(CartierLabError, ArithmeticError):
    pass


class NonInvertibleIndex(CartierLabError, ArithmeticError):
    pass


class NonInvertibleJacobian(CartierLabError, ArithmeticError):
    pass


class DenominatorNotInvertible(CartierLabError, ArithmeticError):
    pass


class NotTorsionFree(CartierLabError, ArithmeticError):
    """Ghost reconstruction needed a division the ring cannot perform."""


class IntegralityFailure(CartierLabError, ArithmeticError):
    """A universal polynomial came out with a non-integral coefficient."""
