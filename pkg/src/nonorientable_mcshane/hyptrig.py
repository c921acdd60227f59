"""Hyperbolic trigonometry and the 2x2 matrix core.

Matrices are stored normalised to ``|det| = 1`` with the sign kept in
``det_sign``. Determinant +1 matrices represent two-sided geodesics
(``tr = 2 cosh(l/2)``), determinant -1 matrices represent one-sided geodesics
(``tr = 2 sinh(l/2)``). Lengths are always full lengths; half arguments are
formed at the point of use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError

TRACE_TOL = 1e-12


class Sidedness(str, Enum):
    ONE_SIDED = "one-sided"
    TWO_SIDED = "two-sided"


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix rescaled on construction so that ``|ad - bc| = 1``."""

    a: float
    b: float
    c: float
    d: float
    det_sign: int = field(init=False)

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if det == 0.0 or not math.isfinite(det):
            raise DomainError("matrix is singular or not finite")
        scale = math.sqrt(abs(det))
        if scale != 1.0:
            object.__setattr__(self, "a", self.a / scale)
            object.__setattr__(self, "b", self.b / scale)
            object.__setattr__(self, "c", self.c / scale)
            object.__setattr__(self, "d", self.d / scale)
        object.__setattr__(self, "det_sign", 1 if det > 0 else -1)

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_rows(cls, rows) -> Mat2:
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d))

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def adjugate(self) -> Mat2:
        return adjugate(self)

    def inverse(self) -> Mat2:
        # adj(M) = det(M) M^-1 and the scale is dropped by normalisation
        adj = adjugate(self)
        return adj if self.det_sign > 0 else Mat2(-adj.a, -adj.b, -adj.c, -adj.d)

    def act(self, z: complex) -> complex:
        """Action on the upper half-plane; orientation reversing maps conjugate first."""
        w = z if self.det_sign > 0 else z.conjugate()
        return (self.a * w + self.b) / (self.c * w + self.d)

    def projectively_close(self, other: Mat2, tol: float = 1e-8) -> bool:
        """Equality in PGL(2, R), i.e. up to an overall sign."""
        mine = (self.a, self.b, self.c, self.d)
        theirs = (other.a, other.b, other.c, other.d)
        plus = max(abs(p - q) for p, q in zip(mine, theirs))
        minus = max(abs(p + q) for p, q in zip(mine, theirs))
        return self.det_sign == other.det_sign and min(plus, minus) < tol


@dataclass(frozen=True)
class GeodesicLength:
    value: float
    sidedness: Sidedness

    def __post_init__(self) -> None:
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise DomainError(f"geodesic length must be finite and >= 0, got {self.value}")
        object.__setattr__(self, "sidedness", Sidedness(self.sidedness))


@dataclass(frozen=True)
class ComplexLength:
    """Complex length with the rotation part reduced modulo pi into (-pi/2, pi/2]."""

    value: complex

    def __post_init__(self) -> None:
        v = complex(self.value)
        im = math.remainder(v.imag, math.pi)
        if im <= -math.pi / 2:
            im += math.pi
        object.__setattr__(self, "value", complex(v.real, im))

    @classmethod
    def from_trace(cls, t: complex) -> ComplexLength:
        """Principal-branch ``2 arccosh(t/2)`` with the real part made non-negative."""
        l = 2.0 * cmath.acosh(complex(t) / 2.0)
        if l.real < 0:
            l = -l
        return cls(l)

    @property
    def length(self) -> float:
        return self.value.real


def stable_acosh(u: float) -> float:
    """``arccosh(u)`` via ``log1p`` so that arguments just above 1 keep full precision."""
    if u < 1.0:
        raise DomainError(f"arccosh argument {u} < 1")
    if u > 1e150:
        # sqrt(u^2 - 1) = u to double precision; avoid squaring
        return math.log(u) + math.log(2.0)
    e = u - 1.0
    return math.log1p(e + math.sqrt(e * (u + 1.0)))


def length_from_trace(t: float, det_sign: int) -> GeodesicLength:
    if det_sign == 1:
        if t < 2.0 - TRACE_TOL:
            raise DomainError(f"two-sided trace must be >= 2, got {t}")
        return GeodesicLength(2.0 * stable_acosh(max(t / 2.0, 1.0)), Sidedness.TWO_SIDED)
    if det_sign == -1:
        if not t > 0.0:
            raise DomainError(f"one-sided trace must be > 0, got {t}")
        return GeodesicLength(2.0 * math.asinh(t / 2.0), Sidedness.ONE_SIDED)
    raise DomainError(f"det_sign must be +1 or -1, got {det_sign}")


def trace_from_length(l: GeodesicLength) -> float:
    if l.sidedness is Sidedness.TWO_SIDED:
        return 2.0 * math.cosh(l.value / 2.0)
    return 2.0 * math.sinh(l.value / 2.0)


def adjugate(M: Mat2) -> Mat2:
    return Mat2(M.d, -M.b, -M.c, M.a)


def _tr_prod(*ms: Mat2) -> float:
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    for m in ms:
        a, b, c, d = (
            a * m.a + b * m.c,
            a * m.b + b * m.d,
            c * m.a + d * m.c,
            c * m.b + d * m.d,
        )
    return a + d


def trace_identity_residual(A: Mat2, B: Mat2) -> float:
    """Residual of the quadratic trace identity

    ``det B (tr A)^2 + det A (tr B)^2 + (tr AB)^2 - tr A tr B tr AB = tr(A B A' B') + 2 det A det B``

    where ``'`` is the adjugate. The residual is divided by ``max(1, |largest term|)``
    so that it measures relative rounding error for matrices with large entries.
    """
    ta, tb, tab = A.trace, B.trace, _tr_prod(A, B)
    da, db = A.det_sign, B.det_sign
    terms = (db * ta * ta, da * tb * tb, tab * tab, -ta * tb * tab)
    rhs_tr = _tr_prod(A, B, adjugate(A), adjugate(B))
    lhs = math.fsum(terms)
    rhs = rhs_tr + 2.0 * da * db
    scale = max(1.0, max(abs(t) for t in terms), abs(rhs_tr))
    return abs(lhs - rhs) / scale


def product_trace_residual(A: Mat2, B: Mat2) -> float:
    """Residual of ``tr AB + tr AB' = tr A tr B``, relative to ``max(1, |tr A tr B|)``."""
    lhs = _tr_prod(A, B) + _tr_prod(A, adjugate(B))
    rhs = A.trace * B.trace
    return abs(lhs - rhs) / max(1.0, abs(rhs), abs(lhs))


def fourth_length_mobius(x: float, y: float, z: float) -> float:
    """Length ``z'`` of the second one-sided geodesic in a Mobius strip minus a disk.

    Solves ``cosh(x/2) + cosh(y/2) = 2 sinh(z/2) sinh(z'/2)``; the map is an
    involution in its last argument.
    """
    if x < 0 or y < 0:
        raise DomainError("boundary lengths must be >= 0")
    if not z > 0:
        raise DomainError("one-sided length z must be > 0")
    return 2.0 * math.asinh((math.cosh(x / 2.0) + math.cosh(y / 2.0)) / (2.0 * math.sinh(z / 2.0)))


def mobius_relation_residual(x: float, y: float, z: float, zp: float) -> float:
    lhs = math.cosh(x / 2.0) + math.cosh(y / 2.0)
    rhs = 2.0 * math.sinh(z / 2.0) * math.sinh(zp / 2.0)
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def hexagon_opposite_side(x: float, y: float, z: float) -> float:
    """Side ``y'`` of a right-angled hexagon opposite ``y``.

    The three alternate sides are ``x/2``, ``y`` and ``z``; ``y'`` lies between
    the sides ``x/2`` and ``z``.
    """
    if not (x > 0 and z > 0):
        raise DomainError("hexagon needs x > 0 and z > 0")
    arg = (math.cosh(y) + math.cosh(x / 2.0) * math.cosh(z)) / (math.sinh(x / 2.0) * math.sinh(z))
    if arg < 1.0:
        raise DomainError("no right-angled hexagon with these sides")
    return stable_acosh(arg)


def quad_foot_length(half_side: float, opposite: float) -> float:
    """Foot distance ``a`` in a Lambert quadrilateral: ``tanh a = tanh(half_side) / cosh(opposite)``."""
    if opposite < 0:
        raise DomainError("opposite side must be >= 0")
    return math.atanh(math.tanh(half_side) / math.cosh(opposite))


def three_fold_trace(x: float, y: float, z: float) -> float:
    """Trace of the curve meeting each of three pairwise disjoint curves once.

    ``x, y, z`` are traces of unit-determinant representatives; the result is the
    commutator trace ``x^2 + y^2 + z^2 - xyz - 2`` whose absolute value is passed
    to :func:`length_from_trace`.
    """
    return x * x + y * y + z * z - x * y * z - 2.0
