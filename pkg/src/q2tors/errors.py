"""Exception types shared across the package."""
from __future__ import annotations


class Q2TorsError(Exception):
    """Base class for all package errors."""


class FactorizationFailure(Q2TorsError):
    """An integer cofactor could not be split within the effort budget."""


class SearchBudgetExceeded(Q2TorsError):
    """A combinatorial search exceeded its configured cap."""


class DivisionByZero(Q2TorsError, ZeroDivisionError):
    pass


class RadicalNotInTower(Q2TorsError):
    pass


class SingularCurve(Q2TorsError):
    pass


class ExcludedJInvariant(Q2TorsError):
    pass


class NonRationalJ(Q2TorsError):
    pass


class NotPrimeOrder(Q2TorsError):
    pass


class NotOdd(Q2TorsError):
    pass


class SquareTwist(Q2TorsError):
    pass


class TooLarge(Q2TorsError):
    pass


class UnlabeledQuotient(Q2TorsError):
    pass


class ParseError(Q2TorsError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
