"""Coordinate charts, volume-form checks and moduli-space integrals for punctured Klein bottles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError, NoSolution, ToleranceNotMet
from .hyptrig import fourth_length_mobius, stable_acosh
from .spectra import bordered_constant

TWO_PI = 2.0 * math.pi
CUTOFF = 60.0
ENVELOPE = 8.0
MC_BATCH = 1_000_000


@dataclass(frozen=True)
class FNPoint:
    """Fenchel-Nielsen point: length of the two-sided geodesic and its twist."""

    l_gamma: float
    theta: float

    def __post_init__(self) -> None:
        if not self.l_gamma > 0:
            raise DomainError("l_gamma must be positive")
        if not 0.0 <= self.theta < self.l_gamma:
            raise DomainError("theta must lie in [0, l_gamma)")


def _constraint_constant(L: float) -> float:
    # Y1^2 + Y2^2 - 2 Y1 Y2 cosh(l/2) = -4 cosh^2(L/4)
    return 4.0 * bordered_constant(L)


def chart_one_sided_from_fn(L: float, p: FNPoint) -> tuple[float, float]:
    """One-sided traces ``Y_i = 2 sinh(l_mu_i / 2)`` from Fenchel-Nielsen coordinates.

    ``Y1 / Y2 = cosh(theta/2) / cosh(l/2 - theta/2)`` together with the quadratic
    constraint at boundary length ``L`` fixes both traces.
    """
    k = _constraint_constant(L)
    h = 0.5 * p.l_gamma
    r = math.cosh(0.5 * p.theta) / math.cosh(h - 0.5 * p.theta)
    denom = 2.0 * r * math.cosh(h) - r * r - 1.0
    if not denom > 0.0:
        raise NoSolution("constraint has no positive root at this point")
    y2 = math.sqrt(k / denom)
    return r * y2, y2


def fn_from_one_sided(L: float, Y1: float, Y2: float) -> FNPoint:
    """Inverse of :func:`chart_one_sided_from_fn`."""
    if not (Y1 > 0 and Y2 > 0):
        raise DomainError("one-sided traces must be positive")
    k = _constraint_constant(L)
    ch = (Y1 * Y1 + Y2 * Y2 + k) / (2.0 * Y1 * Y2)
    if not ch > 1.0:
        raise NoSolution("traces do not determine a hyperbolic two-sided geodesic")
    h = stable_acosh(ch)
    r = Y1 / Y2
    t = (r * ch - 1.0) / (r * math.sinh(h))
    if not -1.0 < t < 1.0:
        raise NoSolution("twist equation has no solution")
    theta = 2.0 * math.atanh(t)
    if not 0.0 <= theta < 2.0 * h:
        raise NoSolution("twist lies outside [0, l_gamma)")
    return FNPoint(2.0 * h, theta)


def one_sided_lengths(L: float, p: FNPoint) -> tuple[float, float]:
    Y1, Y2 = chart_one_sided_from_fn(L, p)
    return 2.0 * math.asinh(0.5 * Y1), 2.0 * math.asinh(0.5 * Y2)


def chart_residual(L: float, p: FNPoint) -> float:
    """Relative residual of the ratio and quadratic equations at the computed chart point."""
    Y1, Y2 = chart_one_sided_from_fn(L, p)
    h = 0.5 * p.l_gamma
    ratio = Y1 / Y2 - math.cosh(0.5 * p.theta) / math.cosh(h - 0.5 * p.theta)
    k = _constraint_constant(L)
    quad = Y1 * Y1 + Y2 * Y2 - 2.0 * Y1 * Y2 * math.cosh(h) + k
    return max(abs(ratio) / (Y1 / Y2), abs(quad) / max(k, Y1 * Y1 + Y2 * Y2))


def _check_step(h: float) -> None:
    if not 1e-6 <= h <= 1e-4:
        raise DomainError("finite-difference step must lie in [1e-6, 1e-4]")


def _fd_det(f: Callable[[float, float], tuple[float, float]], a: float, b: float, h: float) -> float:
    fa_p, fa_m = f(a + h, b), f(a - h, b)
    fb_p, fb_m = f(a, b + h), f(a, b - h)
    j11 = (fa_p[0] - fa_m[0]) / (2 * h)
    j21 = (fa_p[1] - fa_m[1]) / (2 * h)
    j12 = (fb_p[0] - fb_m[0]) / (2 * h)
    j22 = (fb_p[1] - fb_m[1]) / (2 * h)
    return j11 * j22 - j12 * j21


def _lengths_at(L: float) -> Callable[[float, float], tuple[float, float]]:
    def f(l: float, th: float) -> tuple[float, float]:
        # the FNPoint range check would reject theta - h at the chart edge
        k = _constraint_constant(L)
        r = math.cosh(0.5 * th) / math.cosh(0.5 * l - 0.5 * th)
        y2 = math.sqrt(k / (2.0 * r * math.cosh(0.5 * l) - r * r - 1.0))
        return 2.0 * math.asinh(0.5 * r * y2), 2.0 * math.asinh(0.5 * y2)

    return f


def jacobian_check_klein(L: float, p: FNPoint, h: float = 1e-5) -> float:
    """``|det d(l_mu1, l_mu2)/d(l, theta)| * coth(l_mu1/2) coth(l_mu2/2) - 1``.

    Zero when ``dl ^ dtheta = coth(l_mu1/2) coth(l_mu2/2) dl_mu1 ^ dl_mu2``.
    """
    _check_step(h)
    chart_one_sided_from_fn(L, p)
    l1, l2 = one_sided_lengths(L, p)
    det = _fd_det(_lengths_at(L), p.l_gamma, p.theta, h)
    return abs(det) / (math.tanh(0.5 * l1) * math.tanh(0.5 * l2)) - 1.0


def jacobian_y_chart(L: float, p: FNPoint, h: float = 1e-5) -> tuple[float, float]:
    """Finite-difference ``|det d(Y1, Y2)/d(l, theta)|`` and the predicted ``Y1 Y2 / 4``."""
    _check_step(h)
    Y1, Y2 = chart_one_sided_from_fn(L, p)
    f = _lengths_at(L)

    def traces(l: float, th: float) -> tuple[float, float]:
        a, b = f(l, th)
        return 2.0 * math.sinh(0.5 * a), 2.0 * math.sinh(0.5 * b)

    return abs(_fd_det(traces, p.l_gamma, p.theta, h)), 0.25 * Y1 * Y2


def jacobian_check_moebius(
    x: float, y: float, z: float, h: float = 1e-5, half_argument: bool = True
) -> float:
    """Relative residual of ``coth(z/2) dz + coth(z'/2) dz' = 0`` along fixed boundaries.

    ``half_argument=False`` tests the variant with ``coth(z)`` and ``coth(z')``.
    """
    if not z > h:
        raise DomainError("z must exceed the step")
    zp = fourth_length_mobius(x, y, z)
    dzp = (fourth_length_mobius(x, y, z + h) - fourth_length_mobius(x, y, z - h)) / (2 * h)
    s = 0.5 if half_argument else 1.0
    a = 1.0 / math.tanh(s * z)
    b = 1.0 / math.tanh(s * zp)
    return abs(a + b * dzp) / a


# -- integrals ---------------------------------------------------------------


@dataclass(frozen=True)
class IntegrationResult:
    n: int
    method: str
    value: float
    error_estimate: float
    target: Optional[float]
    residual: Optional[float]
    cross_check: Optional[float] = None
    samples: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)


def unfolded_integrand(x, y, n: int = 1):
    """``(2 sinh sinh)^n coth coth / (1 + sinh^2 + sinh^2)^(n+1)`` at half arguments."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx, sy = np.sinh(0.5 * x), np.sinh(0.5 * y)
    cx, cy = np.cosh(0.5 * x), np.cosh(0.5 * y)
    q = 1.0 + sx * sx + sy * sy
    out = 2.0**n * (sx * sy) ** (n - 1) * cx * cy / q ** (n + 1)
    return out if out.ndim else float(out)


def integrand_envelope(x, y):
    """Exponential bound ``8 exp(-|x|/2 - |y|/2)`` on the n = 1 unfolded integrand."""
    return ENVELOPE * np.exp(-0.5 * (np.abs(x) + np.abs(y)))


def truncation_tail(n: int = 1, cutoff: float = CUTOFF) -> float:
    """Bound on the integral outside ``[0, cutoff]^2`` from the envelope (valid for every n >= 1)."""
    return 2.0 * ENVELOPE * 4.0 * math.exp(-0.5 * cutoff)


def _sech(t: float) -> float:
    if t > 700.0:
        return 0.0
    return 1.0 / math.cosh(t)


def direct_integral(n: int = 1, epsabs: float = 1e-13) -> tuple[float, float]:
    """``int_0^inf l tanh(l/2) sech^n(l/2) dl`` (the twist integrates to ``l``)."""
    val, err = integrate.quad(
        lambda l: l * math.tanh(0.5 * l) * _sech(0.5 * l) ** n,
        0.0,
        math.inf,
        epsabs=epsabs,
        epsrel=1e-13,
        limit=200,
    )
    return val, err


def unfolded_integral(n: int = 1, epsabs: float = 1e-11) -> tuple[float, float]:
    val, err = integrate.dblquad(
        lambda y, x: unfolded_integrand(x, y, n),
        0.0,
        CUTOFF,
        0.0,
        CUTOFF,
        epsabs=epsabs,
        epsrel=1e-12,
    )
    return val, err + truncation_tail(n)


def monte_carlo_integral(n: int = 1, samples: int = 10_000_000, seed: int = 0) -> tuple[float, float]:
    """Importance sampling with independent ``Exp(rate 1/2)`` coordinates.

    Returns the mean and its standard error. Batches use child streams of
    ``SeedSequence(seed)`` so the result does not depend on the batch layout
    beyond ``MC_BATCH``.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    n_batches = -(-samples // MC_BATCH)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    total = 0.0
    total_sq = 0.0
    left = samples
    for child in children:
        m = min(MC_BATCH, left)
        left -= m
        rng = np.random.default_rng(child)
        x = rng.exponential(2.0, m)
        y = rng.exponential(2.0, m)
        w = unfolded_integrand(x, y, n) * 4.0 * np.exp(0.5 * (x + y))
        total += float(w.sum())
        total_sq += float(np.dot(w, w))
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / (samples - 1))


def integrate_punctured_klein(
    n: int = 1,
    method: str = "quadrature",
    tolerance: float = 1e-9,
    samples: int = 10_000_000,
    seed: int = 0,
) -> IntegrationResult:
    """Integral of ``tanh(l/2) / cosh^n(l/2)`` over the moduli space of punctured Klein bottles.

    Computed through the unfolded double integral; the direct one-dimensional
    form is returned as ``cross_check``. Only ``n = 1`` has a known value (2 pi).
    """
    if not (isinstance(n, int) and n >= 1):
        raise DomainError("n must be an integer >= 1")
    target = TWO_PI if n == 1 else None
    direct, _ = direct_integral(n)
    if method in ("quadrature", "quad"):
        value, err = unfolded_integral(n)
        if err > tolerance:
            raise ToleranceNotMet(f"quadrature error estimate {err:.3g} exceeds {tolerance:.3g}")
        method, count = "quadrature", None
    elif method in ("montecarlo", "mc"):
        value, err = monte_carlo_integral(n, samples, seed)
        method, count = "montecarlo", samples
    else:
        raise DomainError(f"unknown method {method!r}")
    residual = None if target is None else value - target
    return IntegrationResult(n, method, value, err, target, residual, direct, count)
