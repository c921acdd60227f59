"""Closed-form summand functions R, D, E, F and their relations.

Each function is evaluated through an algebraically equivalent rewriting that
never forms a ratio of two large, nearly equal quantities:

* ``R`` is ``x - log1p(q)`` unless ``R`` itself is small, where it switches to
  ``-log1p(-w)`` with ``w`` a sum of positive terms; in both branches every hyperbolic function handled in log
  space so that arguments in the hundreds do not overflow.
* ``F`` and the pair ``F(x,y,z) + F(x,z,y)`` are rewritten so that every
  numerator and denominator is a sum of positive terms.

Only pair sums of ``E`` carry meaning; ``E`` alone is an arbitrary split.
"""

from __future__ import annotations

import math

from .errors import DomainError
from .hyptrig import fourth_length_mobius, hexagon_opposite_side, quad_foot_length

_LN2 = math.log(2.0)


def _check(*args: float) -> None:
    for v in args:
        if not (v >= 0.0 and math.isfinite(v)):
            raise DomainError(f"summand arguments must be finite and >= 0, got {v}")


def _logaddexp(p: float, q: float) -> float:
    hi, lo = (p, q) if p >= q else (q, p)
    return hi + math.log1p(math.exp(lo - hi))


def _log_cosh(u: float) -> float:
    u = abs(u)
    return u + math.log1p(math.exp(-2.0 * u)) - _LN2


def _log_sinh(u: float) -> float:
    """``log(sinh u)`` for ``u > 0``."""
    if u < 1.0:
        return math.log(math.sinh(u))
    return u + math.log1p(-math.exp(-2.0 * u)) - _LN2


def _log_expm1(u: float) -> float:
    """``log(e^u - 1)`` for ``u > 0``."""
    if u < 1.0:
        return math.log(math.expm1(u))
    return u + math.log1p(-math.exp(-u))


def _softplus(t: float) -> float:
    """``log(1 + e^t)``."""
    if t > 0:
        return t + math.log1p(math.exp(-t))
    return math.log1p(math.exp(t))


def R(x: float, y: float, z: float) -> float:
    """``x - ln[(cosh(y/2) + cosh((x+z)/2)) / (cosh(y/2) + cosh((x-z)/2))]``.

    ``R(x,y,z)/x`` is the probability that a perpendicular from the boundary of
    length ``x`` avoids the boundary of length ``z``.
    """
    _check(x, y, z)
    if x == 0.0:
        return 0.0
    if z == 0.0:
        return x
    log_den = _logaddexp(_log_cosh(y / 2.0), _log_cosh((x - z) / 2.0))
    # numerator / denominator = 1 + q
    log_q = _LN2 + _log_sinh(x / 2.0) + _log_sinh(z / 2.0) - log_den
    log_ratio = _softplus(log_q)
    if x - log_ratio >= 0.5:
        return x - log_ratio
    # small R: numerator / (e^x denominator) = 1 - w, with w a sum of positive terms
    w = math.exp(_log_expm1(x) - x + _log_cosh(y / 2.0) - log_den) + math.exp(
        (x - z) / 2.0 + _log_sinh(x) - x - log_den
    )
    return -math.log1p(-w)


def D(x: float, y: float, z: float) -> float:
    """``R(x,y,z) + R(x,z,y) - x``; symmetric in ``y, z`` bit for bit.

    Evaluated as ``2 ln[(e^{x/2} + e^{(y+z)/2}) / (e^{-x/2} + e^{(y+z)/2})]``, the
    same function without the cancellation of the defining sum.
    """
    _check(x, y, z)
    if x == 0.0:
        return 0.0
    log_q = _LN2 + _log_sinh(x / 2.0) - _logaddexp(-x / 2.0, (y + z) / 2.0)
    return 2.0 * _softplus(log_q)


def E(x: float, y: float, z: float) -> float:
    """``R(x, 2z, y) - x/2``.

    The split of a pair sum into two E terms is a convention; use :func:`e_pair`.
    """
    return R(x, 2.0 * z, y) - x / 2.0


def e_pair(x: float, y: float, z: float) -> float:
    """``E(x,y,z) + E(x,y,z')`` with ``z'`` the partner one-sided length."""
    return E(x, y, z) + E(x, y, fourth_length_mobius(x, y, z))


def _cosh_over(u: float, m: float) -> float:
    """``cosh(u) / cosh(m)`` for ``|u| <= m`` without overflow."""
    u = abs(u)
    return math.exp(u - m) * (1.0 + math.exp(-2.0 * u)) / (1.0 + math.exp(-2.0 * m))


def _sinh_over(u: float, m: float) -> float:
    """``sinh(u) / cosh(m)`` for ``0 <= u <= m``."""
    if u < 1.0:
        return math.sinh(u) * _sech(m)
    return math.exp(u - m) * (1.0 - math.exp(-2.0 * u)) / (1.0 + math.exp(-2.0 * m))


def _sech(m: float) -> float:
    return 2.0 * math.exp(-m) / (1.0 + math.exp(-2.0 * m))


def _cosh_m1_over(u: float, m: float) -> float:
    """``(cosh(u) - 1) / cosh(m)``."""
    if abs(u) < 1.0:
        return 2.0 * math.sinh(u / 2.0) ** 2 * _sech(m)
    return _cosh_over(u, m) - _sech(m)


def _cosh_diff_over(y: float, z: float, m: float) -> float:
    """``(cosh(y) - cosh(z)) / cosh(m)`` with ``m = max(y, z)``."""
    half = (y - z) / 2.0
    if abs(half) > 300.0:
        return _cosh_over(y, m) - _cosh_over(z, m)
    return 2.0 * _sinh_over((y + z) / 2.0, m) * math.sinh(half)


# With e = exp(x/2), c = cosh(x/2), s = sinh(x/2), Y = cosh y, Z = cosh z:
#   F(x,y,z) = ln[(eY + Z + se) / (Y + eZ - s)]
# and the denominator equals Y + e(Z - 1) + c, a sum of positive terms.


def F(x: float, y: float, z: float) -> float:
    """``x/2 - ln[(cosh y + e^{x/2} cosh z - sinh(x/2)) / (cosh y + e^{-x/2} cosh z + sinh(x/2))]``."""
    _check(x, y, z)
    if x == 0.0:
        return 0.0
    m = max(y, z)
    inv = _sech(m)
    e, c, s = math.exp(x / 2.0), math.cosh(x / 2.0), math.sinh(x / 2.0)
    yn, zn = _cosh_over(y, m), _cosh_over(z, m)
    den = yn + e * _cosh_m1_over(z, m) + c * inv
    # numerator minus denominator = (e - 1)(Y - Z + c + 1)
    diff = math.expm1(x / 2.0) * (_cosh_diff_over(y, z, m) + (c + 1.0) * inv)
    ratio = diff / den
    if abs(ratio) <= 0.5:
        return math.log1p(ratio)
    return math.log(e * yn + zn + s * e * inv) - math.log(den)


def f_pair(x: float, y: float, z: float) -> float:
    """``F(x,y,z) + F(x,z,y)`` as ``log1p`` of a ratio of positive terms.

    With ``P = eY + Z`` and ``Q = Y + eZ`` the pair equals
    ``log1p(s[(e+1)^2 (Y+Z) + s(e^2-1)] / ((P-s)(Q-s)))``.
    """
    _check(x, y, z)
    if x == 0.0:
        return 0.0
    m = max(y, z)
    inv = _sech(m)
    e, c, s = math.exp(x / 2.0), math.cosh(x / 2.0), math.sinh(x / 2.0)
    yn, zn = _cosh_over(y, m), _cosh_over(z, m)
    num = s * ((e + 1.0) ** 2 * (yn + zn) * inv + s * (e * e - 1.0) * inv * inv)
    p_minus = e * _cosh_m1_over(y, m) + zn + c * inv
    q_minus = yn + e * _cosh_m1_over(z, m) + c * inv
    return math.log1p(num / (p_minus * q_minus))


def hexagon_feet(x: float, y: float, z: float) -> tuple[float, float]:
    """Feet ``(a, b)`` of the perpendiculars dropped inside the hexagon with alternate sides ``x/2, y, z``.

    ``a`` comes from the quadrilateral on the ``z`` side and ``b`` from the one on
    the ``y`` side; ``F(x,y,z) = x/2 - 2a`` and the pair sum is ``x - 2a - 2b``.
    """
    a = quad_foot_length(z / 2.0, hexagon_opposite_side(x, y, z))
    b = quad_foot_length(y / 2.0, hexagon_opposite_side(x, z, y))
    return a, b


def relation_DER_residual(x: float, y: float, z: float) -> float:
    """Consistency of ``E`` with the Mobius partition relation (zero up to rounding)."""
    if not x > 0:
        raise DomainError("x must be > 0")
    zp = fourth_length_mobius(x, y, z)
    total = E(x, y, z) + E(x, y, zp) + (x - R(x, 2.0 * z, y)) + (x - R(x, 2.0 * zp, y))
    return abs(total / x - 1.0)


def bordered_rhs(L: float, l_gamma: float) -> float:
    """``2 ln[(1 + e^{L/2} e^{l}) / (e^{L/2} + e^{l})]``, equal to ``L - D(L, l, l)``."""
    if L < 0 or not l_gamma > 0:
        raise DomainError("need L >= 0 and l_gamma > 0")
    # ratio - 1 = (e^{L/2} - 1)(e^l - 1) / (e^{L/2} + e^l)
    frac = -math.expm1(-l_gamma) / (1.0 + math.exp(L / 2.0 - l_gamma))
    return 2.0 * math.log1p(math.expm1(L / 2.0) * frac)
