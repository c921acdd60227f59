"""McShane-type series with certified (or, for the bordered case, estimated) tails.

Klein bottle series are sums over consecutive pairs ``(y_i, y_{i+1})`` of a
trace sequence, pulled alternately from the positive and negative end until
the tail bound drops below the tolerance. The punctured torus sum walks the
Markoff tree depth first.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Union

from .errors import DegenerateCoefficient, DomainError, InvalidSeed, LoxodromicViolation
from .identities import bordered_rhs, f_pair
from .spectra import (
    SpectrumState,
    bordered_constant,
    extend,
    general_solution,
    spectrum_from_seed,
    two_sided_length,
)

Number = Union[float, complex]

EPS = sys.float_info.epsilon
LOXODROMIC_MARGIN = 1e-6
CHUNK = 32


@dataclass(frozen=True)
class SeriesReport:
    kind: str
    seed: tuple
    Z: Optional[Number]
    l_gamma: Optional[Number]
    partial_sum: Number
    target: Optional[Number]
    residual: Optional[float]
    terms_used: int
    tail_bound: float
    tolerance: float
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


class _Window:
    """Lazily extended view of a sequence; grows in chunks as indices are requested."""

    def __init__(self, state: SpectrumState):
        self.state = state

    def get(self, i: int) -> Number | None:
        s = self.state
        while i not in s:
            if (i > s.hi and s.truncated_pos) or (i < s.lo and s.truncated_neg):
                return None
            s = extend(s, CHUNK)
        self.state = s
        return s.y(i)


def _kahan_add(total: Number, comp: Number, v: Number) -> tuple[Number, Number]:
    # Neumaier summation; works for complex values as well
    t = total + v
    if abs(total) >= abs(v):
        comp += (total - t) + v
    else:
        comp += (v - t) + total
    return t, comp


def _run(
    term: Callable[[int], Number | None],
    tail: Callable[[int, int], float | None],
    tol: float,
    max_terms: int,
) -> tuple[Number, int, float, bool]:
    """Pull terms ``i = 0, 1, -1, 2, -2, ...`` until ``tail(lo, hi) < tol``."""
    first = term(0)
    if first is None:
        return 0.0, 0, math.inf, False
    total, comp = first, 0.0 * first
    lo = hi = 0
    n = 1
    bound = math.inf
    while True:
        t = tail(lo, hi)
        if t is not None:
            # rounding slack of the accumulated sum
            bound = t + 4.0 * EPS * n * abs(total + comp)
            if bound < tol:
                return total + comp, n, bound, True
        if n >= max_terms:
            return total + comp, n, bound, False
        nxt = hi + 1 if hi <= -lo else lo - 1
        v = term(nxt)
        if v is None:
            return total + comp, n, bound, False
        total, comp = _kahan_add(total, comp, v)
        if nxt > hi:
            hi = nxt
        else:
            lo = nxt
        n += 1


def _check_tol(tol: float, max_terms: int) -> None:
    if not tol > 0:
        raise DomainError("tolerance must be > 0")
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")


def telescoping_partial_sum(state: SpectrumState, lo: int, hi: int) -> float:
    """Closed form of ``sum_{i=lo}^{hi} 1/(1 + y_i^2 + y_{i+1}^2)`` for a cusped sequence."""
    return (state.y(lo - 1) / state.y(lo) - state.y(hi) / state.y(hi + 1)) / state.Z


def sum_punctured_klein(
    y0: float, y1: float, tol: float = 1e-12, max_terms: int = 10000
) -> SeriesReport:
    """``sum_i 1/(1 + y_i^2 + y_{i+1}^2)`` against ``tanh(l_gamma/2)``.

    The remainders on both sides are exact telescoping differences against the
    limiting ratios ``exp(-l_gamma/2)`` and ``exp(l_gamma/2)``.
    """
    _check_tol(tol, max_terms)
    win = _Window(spectrum_from_seed(float(y0), float(y1), 1.0))
    Z = win.state.Z
    l_gamma = two_sided_length(Z)
    r_up, r_down = math.exp(-l_gamma / 2.0), math.exp(l_gamma / 2.0)

    def term(i: int) -> float | None:
        a, b = win.get(i), win.get(i + 1)
        if a is None or b is None:
            return None
        return 1.0 / (1.0 + a * a + b * b)

    def tail(lo: int, hi: int) -> float | None:
        up_a, up_b = win.get(hi), win.get(hi + 1)
        dn_a, dn_b = win.get(lo - 1), win.get(lo)
        if None in (up_a, up_b, dn_a, dn_b):
            return None
        upper = max(up_a / up_b - r_up, 0.0)
        lower = max(r_down - dn_a / dn_b, 0.0)
        return (upper + lower) / Z + 4.0 * EPS * (r_down + 1.0) / Z

    total, n, bound, ok = _run(term, tail, tol, max_terms)
    target = math.tanh(l_gamma / 2.0)
    return SeriesReport(
        "punctured-klein", (y0, y1), Z, l_gamma, total, target, abs(total - target),
        n, bound, tol, ok,
    )


BORDERED_WINDOW = 5


def sum_bordered_klein(
    L: float, y0: float, y1: float, tol: float = 1e-10, max_terms: int = 10000
) -> SeriesReport:
    """``sum_i [F(L, l_i, l_{i+1}) + F(L, l_{i+1}, l_i)]`` against the bordered right-hand side.

    There is no telescoping form here. The tail on each side is estimated as
    ``C exp(-min(l_i, l_{i+1}))`` summed geometrically, with ``C`` the largest
    value of ``term * exp(min length)`` over the last five terms of that side,
    doubled. The length increment used as the geometric ratio is the latest
    observed one, which only grows further out.
    """
    _check_tol(tol, max_terms)
    if not L > 0:
        raise DomainError("boundary length must be > 0")
    c = bordered_constant(L)
    win = _Window(spectrum_from_seed(float(y0), float(y1), c))
    Z = win.state.Z
    l_gamma = two_sided_length(Z)
    cache: dict[int, float] = {}

    def length(i: int) -> float | None:
        y = win.get(i)
        return None if y is None else 2.0 * math.asinh(y)

    def term(i: int) -> float | None:
        a, b = length(i), length(i + 1)
        if a is None or b is None:
            return None
        v = f_pair(L, a, b)
        cache[i] = v
        return v

    def side_constant(idx: list[int]) -> float:
        best = 0.0
        for i in idx:
            m = min(length(i), length(i + 1))
            best = max(best, cache[i] * math.exp(m))
        return 2.0 * best

    def tail(lo: int, hi: int) -> float | None:
        if hi < BORDERED_WINDOW or -lo < BORDERED_WINDOW:
            return None
        nxt_up, cur_up = length(hi + 1), length(hi)
        nxt_dn, cur_dn = length(lo), length(lo + 1)
        if None in (nxt_up, cur_up, nxt_dn, cur_dn):
            return None
        g_up, g_dn = nxt_up - cur_up, nxt_dn - cur_dn
        if g_up <= 0 or g_dn <= 0:
            return None
        c_up = side_constant(list(range(hi - BORDERED_WINDOW + 1, hi + 1)))
        c_dn = side_constant(list(range(lo, lo + BORDERED_WINDOW)))
        upper = c_up * math.exp(-nxt_up) / -math.expm1(-g_up)
        lower = c_dn * math.exp(-nxt_dn) / -math.expm1(-g_dn)
        return upper + lower

    total, n, bound, ok = _run(term, tail, tol, max_terms)
    target = bordered_rhs(L, l_gamma)
    return SeriesReport(
        "bordered-klein", (L, y0, y1), Z, l_gamma, total, target, abs(total - target),
        n, bound, tol, ok,
    )


def _torus_term(x: float) -> float:
    """``1/(1 + e^l)`` for ``x = 2 cosh(l/2)``, written without cancellation."""
    u = 4.0 / (x * x)
    return (u / 2.0) / (1.0 + math.sqrt(1.0 - u))


PRUNE = 1e-18


def sum_punctured_torus(
    depth: int = 25,
    tol: float = 1e-6,
    root: tuple[float, float, float] = (3.0, 3.0, 3.0),
) -> SeriesReport:
    """``sum 1/(1 + e^{l})`` over simple closed geodesics of a once-punctured torus.

    Geodesics correspond to the complementary regions of the Markoff tree, so
    every tree node contributes the one region created by its flip. Below a
    node whose new trace is ``t`` each flip multiplies the new trace by at least
    ``g = min(root) - 1``, which bounds the unexplored subtree by
    ``(2/t^2) * k`` with ``k = (2/g^2) / (1 - 2/g^2)``. Subtrees whose bound is
    negligible are pruned and their bound is added to the tail.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    x, y, z = map(float, root)
    if abs(x * x + y * y + z * z - x * y * z) > 1e-9 * max(1.0, x * y * z):
        raise InvalidSeed("root is not a Markoff triple of a cusped torus")
    g = min(root) - 1.0
    ratio = 2.0 / (g * g)
    k = ratio / (1.0 - ratio) if ratio < 1.0 else math.inf

    total, comp = 0.0, 0.0
    for v in (x, y, z):
        total, comp = _kahan_add(total, comp, _torus_term(v))
    n = 3
    tail = 0.0
    # stack entries: (older, older, newest, depth)
    stack = [(y, z, x, 0), (x, z, y, 0), (x, y, z, 0)]
    while stack:
        a, b, cc, d = stack.pop()
        new = a * b - cc
        total, comp = _kahan_add(total, comp, _torus_term(new))
        n += 1
        sub = 2.0 * k / (new * new)
        if d + 1 >= depth or sub < PRUNE:
            tail += sub
            continue
        stack.append((a, new, b, d + 1))
        stack.append((b, new, a, d + 1))
    s = total + comp
    bound = tail + 4.0 * EPS * n * s
    return SeriesReport(
        "punctured-torus", tuple(root), None, None, s, 0.5, abs(s - 0.5), n, bound, tol,
        bound < tol,
    )


def complex_two_sided_length(y0: complex, y1: complex) -> complex:
    """Principal ``2 arccosh((1 + y0^2 + y1^2) / (2 y0 y1))`` with non-negative real part."""
    l = 2.0 * cmath.acosh((1.0 + y0 * y0 + y1 * y1) / (2.0 * y0 * y1))
    return -l if l.real < 0 else l


def sum_complex(
    y0: complex, y1: complex, tol: float = 1e-10, max_terms: int = 10000
) -> SeriesReport:
    """Quasi-Fuchsian version of the punctured Klein bottle series.

    The tail uses the lower envelope ``|y_n| >= | |A| e^{n lam/2} - |B| e^{-n lam/2} |``
    of the closed-form solution, ``lam = Re(l_gamma)``, together with
    ``1/(1 + y_i^2 + y_{i+1}^2) = 1/(Z y_i y_{i+1})``.
    """
    _check_tol(tol, max_terms)
    y0, y1 = complex(y0), complex(y1)
    if y0 == 0 or y1 == 0:
        raise InvalidSeed("seed entries must be non-zero")
    l_gamma = complex_two_sided_length(y0, y1)
    lam = l_gamma.real
    if not abs(lam) > LOXODROMIC_MARGIN:
        raise LoxodromicViolation(
            f"Re(l_gamma) = {lam!r}: two-sided trace is not loxodromic, series not certified"
        )
    coeffs = general_solution(y0, l_gamma, 1.0, y1)
    A, B = abs(coeffs.c_plus), abs(coeffs.c_minus)
    if A < 1e-300 or B < 1e-300:
        raise DegenerateCoefficient("a closed-form coefficient vanishes")
    win = _Window(spectrum_from_seed(y0, y1, 1.0))
    Z = win.state.Z
    absZ = abs(Z)
    geo = -math.expm1(-lam)

    def term(i: int) -> complex | None:
        a, b = win.get(i), win.get(i + 1)
        if a is None or b is None:
            return None
        return 1.0 / (1.0 + a * a + b * b)

    def tail(lo: int, hi: int) -> float | None:
        n_up = hi + 1
        q_up = (B / A) * math.exp(-n_up * lam)
        k_dn = -lo
        q_dn = (A / B) * math.exp(-k_dn * lam)
        if q_up >= 1.0 or q_dn >= 1.0:
            return None
        upper = math.exp(-(2 * n_up + 1) * lam / 2.0) / (absZ * A * A * (1 - q_up) ** 2 * geo)
        lower = math.exp(-(2 * k_dn + 1) * lam / 2.0) / (absZ * B * B * (1 - q_dn) ** 2 * geo)
        return upper + lower

    total, n, bound, ok = _run(term, tail, tol, max_terms)
    target = cmath.tanh(l_gamma / 2.0)
    return SeriesReport(
        "complex", (y0, y1), Z, l_gamma, total, target, abs(total - target), n, bound, tol, ok,
    )
