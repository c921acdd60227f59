"""McShane-type identities on non-orientable hyperbolic surfaces."""

from .errors import (
    DegenerateCoefficient,
    DomainError,
    InvalidSeed,
    LoxodromicViolation,
    NoSolution,
    NumericalDegeneracy,
    ToleranceNotMet,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateCoefficient",
    "DomainError",
    "InvalidSeed",
    "LoxodromicViolation",
    "NoSolution",
    "NumericalDegeneracy",
    "ToleranceNotMet",
    "__version__",
]
