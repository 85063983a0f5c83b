"""Exception types shared across the package."""

from __future__ import annotations


class CharpError(Exception):
    """Base class for all library errors."""


class ZeroDenominator(CharpError, ZeroDivisionError):
    pass


class ZeroPolynomial(CharpError, ValueError):
    pass


class ZeroArgument(CharpError, ValueError):
    """An operation defined only on nonzero elements received zero."""


class FieldError(CharpError, ValueError):
    """Invalid field data (non-prime characteristic, reducible modulus, ...)."""


class RankZero(CharpError, ValueError):
    """The group is torsion, so there is nothing to select places for."""


class NoPlaceAssignment(CharpError, ValueError):
    """No set of places in the search range admits a diagonal basis."""


class DimensionMismatch(CharpError, ValueError):
    pass


class NotDominant(CharpError, ValueError):
    """A monomial map whose exponent matrix is singular."""


class ParseError(CharpError, ValueError):
    """Syntax error in an expression or problem file.

    ``line`` and ``column`` are 1-based; ``expected`` is the set of tokens
    that would have been accepted at that position.
    """

    def __init__(self, message: str, line: int = 1, column: int = 1,
                 expected: frozenset[str] | set[str] = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"line {line}, column {column}: {message}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class ValidationError(CharpError, ValueError):
    """A problem file parsed but violates a semantic constraint."""
