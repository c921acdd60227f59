"""Exception hierarchy shared by all modules.

Input problems derive from ``ValueError`` so generic callers can still catch
them; numerical problems derive from ``ArithmeticError``.
"""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class InvalidSeed(DomainError):
    """A trace seed does not define a hyperbolic structure."""


class LoxodromicViolation(InvalidSeed):
    """The two-sided trace of a complex seed is not loxodromic."""


class DegenerateCoefficient(InvalidSeed):
    """One coefficient of the closed-form solution vanishes, so no growth bound applies."""


class NoSolution(DomainError):
    """A coordinate chart has no positive solution at the requested point."""


class NumericalDegeneracy(ArithmeticError):
    """A traced geodesic passed too close to a polygon vertex to classify reliably."""


class ToleranceNotMet(ArithmeticError):
    """An adaptive routine could not certify the requested accuracy."""
