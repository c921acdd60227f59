"""Trace sequences of simple closed geodesics.

On a punctured (or bordered) Klein bottle the one-sided geodesics disjoint from
the unique two-sided geodesic ``gamma`` form a bi-infinite sequence. With
``y_i = sinh(l_i / 2)`` and ``Z = 2 cosh(l_gamma / 2)`` consecutive terms obey

    y_{i-1} + y_{i+1} = Z y_i        y_{i-1} y_{i+1} - y_i^2 = c

where ``c = 1`` for a cusp and ``c = cosh^2(L/4)`` for a boundary of length ``L``.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Union

from .errors import DomainError, InvalidSeed
from .hyptrig import Mat2, stable_acosh

Number = Union[float, complex]

OVERFLOW_GUARD = 1e300
PARABOLIC_MARGIN = 1e-12
RELATION_TOL = 1e-9


def bordered_constant(L: float) -> float:
    """Recursion constant ``cosh^2(L/4)`` for a boundary of length ``L`` (1 for a cusp)."""
    if not L >= 0:
        raise DomainError("boundary length must be >= 0")
    return math.cosh(L / 4.0) ** 2


def z_from_seed(y0: float, y1: float, c: float = 1.0) -> float:
    """Two-sided trace ``Z = (c + y0^2 + y1^2) / (y0 y1)`` of a real seed."""
    if not (y0 > 0 and y1 > 0):
        raise InvalidSeed("seed entries must be positive")
    if not c > 0:
        raise InvalidSeed("recursion constant must be positive")
    Z = (c + y0 * y0 + y1 * y1) / (y0 * y1)
    if not Z - 2.0 > PARABOLIC_MARGIN:
        raise InvalidSeed(f"Z = {Z!r} does not exceed 2; no hyperbolic two-sided geodesic")
    return Z


def two_sided_length(Z: float) -> float:
    """``l_gamma = 2 arccosh(Z/2)``."""
    return 2.0 * stable_acosh(Z / 2.0)


@dataclass(frozen=True)
class SpectrumState:
    """Generated window ``y_{-len(y_neg)} .. y_{len(y_pos)-1}`` of a trace sequence.

    ``y_neg[k]`` holds ``y_{-(k+1)}``. Entries may be complex for quasi-Fuchsian
    seeds. Extension returns a new state.
    """

    y_pos: tuple[Number, ...]
    y_neg: tuple[Number, ...]
    Z: Number
    c: float
    truncated_pos: bool = False
    truncated_neg: bool = False

    @property
    def lo(self) -> int:
        return -len(self.y_neg)

    @property
    def hi(self) -> int:
        return len(self.y_pos) - 1

    def y(self, i: int) -> Number:
        if i >= 0:
            return self.y_pos[i]
        return self.y_neg[-i - 1]

    def __contains__(self, i: int) -> bool:
        return self.lo <= i <= self.hi

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def values(self) -> list[Number]:
        return [self.y(i) for i in self.indices()]

    def length(self, i: int) -> float:
        """One-sided length ``2 arcsinh(y_i)`` (real sequences only)."""
        return 2.0 * math.asinh(self.y(i))

    @property
    def l_gamma(self) -> float:
        return two_sided_length(self.Z)

    def relation_residuals(self) -> tuple[float, float]:
        """Largest relative residuals of the linear and the quadratic relation."""
        lin = quad = 0.0
        for i in range(self.lo + 1, self.hi):
            a, b, d = self.y(i - 1), self.y(i), self.y(i + 1)
            scale = max(abs(a), abs(d), abs(b * self.Z), 1.0)
            lin = max(lin, abs(a + d - b * self.Z) / scale)
            quad = max(quad, abs(a * d - b * b - self.c) / max(abs(b * b), abs(a * d), 1.0))
        return lin, quad


def spectrum_from_seed(y0: Number, y1: Number, c: float = 1.0) -> SpectrumState:
    """Start a sequence from ``(y_0, y_1)``; real seeds are validated by :func:`z_from_seed`."""
    if isinstance(y0, complex) or isinstance(y1, complex):
        if y0 == 0 or y1 == 0:
            raise InvalidSeed("seed entries must be non-zero")
        Z: Number = (c + y0 * y0 + y1 * y1) / (y0 * y1)
    else:
        Z = z_from_seed(y0, y1, c)
    return SpectrumState((y0, y1), (), Z, c)


def _grow(prev: Number, cur: Number, Z: Number, n: int, c: float) -> tuple[list[Number], bool]:
    out: list[Number] = []
    for _ in range(n):
        nxt = cur * Z - prev
        if not abs(nxt) <= OVERFLOW_GUARD:
            return out, True
        scale = max(abs(prev * nxt), abs(cur * cur), 1.0)
        if abs(prev * nxt - cur * cur - c) > RELATION_TOL * scale:
            raise ArithmeticError("quadratic recursion relation violated during extension")
        out.append(nxt)
        prev, cur = cur, nxt
    return out, False


def extend(state: SpectrumState, n: int) -> SpectrumState:
    """Append up to ``n`` terms in each direction via ``y_next = Z y_cur - y_prev``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    pos, neg = state.y_pos, state.y_neg
    tp, tn = state.truncated_pos, state.truncated_neg
    if n and not tp:
        prev = state.y(state.hi - 1)
        more, tp = _grow(prev, pos[-1], state.Z, n, state.c)
        pos = pos + tuple(more)
    if n and not tn:
        prev = state.y(state.lo + 1)
        more, tn = _grow(prev, state.y(state.lo), state.Z, n, state.c)
        neg = neg + tuple(more)
    return replace(state, y_pos=pos, y_neg=neg, truncated_pos=tp, truncated_neg=tn)


def extend_forward(state: SpectrumState, n: int) -> SpectrumState:
    if state.truncated_pos or n <= 0:
        return state
    more, tp = _grow(state.y(state.hi - 1), state.y_pos[-1], state.Z, n, state.c)
    return replace(state, y_pos=state.y_pos + tuple(more), truncated_pos=tp)


def extend_backward(state: SpectrumState, n: int) -> SpectrumState:
    if state.truncated_neg or n <= 0:
        return state
    more, tn = _grow(state.y(state.lo + 1), state.y(state.lo), state.Z, n, state.c)
    return replace(state, y_neg=state.y_neg + tuple(more), truncated_neg=tn)


def minimum_index(state: SpectrumState) -> int:
    """Index of the smallest term of a real sequence (the shortest one-sided geodesic).

    The sequence is convex in ``i`` (``y_{i-1} + y_{i+1} > 2 y_i``), so the
    minimum lies where the forward difference changes sign; the state is
    extended until that happens.
    """
    s = state
    while True:
        if s.y(s.hi) > s.y(s.hi - 1) and s.y(s.lo) > s.y(s.lo + 1):
            break
        if s.truncated_pos and s.truncated_neg:
            break
        s = extend(s, 8)
    return min(s.indices(), key=lambda i: (s.y(i), abs(i)))


@dataclass(frozen=True)
class GeneralSolutionCoeffs:
    """``y_n = c_plus exp(n l/2) + c_minus exp(-n l/2)``."""

    c_plus: Number
    c_minus: Number
    l_gamma: Number

    def y(self, n: int) -> Number:
        lam = _exp(self.l_gamma / 2.0 * n)
        return self.c_plus * lam + self.c_minus / lam


def _exp(v: Number) -> Number:
    return cmath.exp(v) if isinstance(v, complex) else math.exp(v)


def general_solution(
    y0: Number, l_gamma: Number, c: float = 1.0, y1: Number | None = None
) -> GeneralSolutionCoeffs:
    """Closed-form coefficients of the sequence through ``y_0`` with two-sided length ``l_gamma``.

    They satisfy ``c_plus + c_minus = y0`` and ``c_plus c_minus 4 sinh^2(l/2) = c``.
    Without ``y1`` the two roots are ambiguous (they describe the sequence and
    its reversal); the larger root is taken as ``c_plus``. With ``y1`` the
    coefficients follow linearly and complex inputs are allowed.
    """
    if y1 is not None:
        lam = _exp(l_gamma / 2.0)
        c_plus = (y1 - y0 / lam) / (lam - 1.0 / lam)
        return GeneralSolutionCoeffs(c_plus, y0 - c_plus, l_gamma)
    if isinstance(y0, complex) or isinstance(l_gamma, complex):
        raise DomainError("complex sequences need y1 to fix the coefficients")
    if not l_gamma > 0:
        raise DomainError("l_gamma must be > 0")
    prod = c / (4.0 * math.sinh(l_gamma / 2.0) ** 2)
    disc = y0 * y0 - 4.0 * prod
    if disc < 0:
        raise InvalidSeed("complex coefficients: (y0, l_gamma, c) is not a real spectrum")
    root = math.sqrt(disc)
    c_plus = (y0 + root) / 2.0
    # product form avoids cancellation in the smaller root
    c_minus = prod / c_plus
    return GeneralSolutionCoeffs(c_plus, c_minus, l_gamma)


@dataclass(frozen=True)
class MarkoffTriple:
    """Traces ``(x, y, z)`` of three simple closed geodesics pairwise meeting once.

    Stored sorted; ``x^2 + y^2 + z^2 - xyz = 2 - delta``.
    """

    x: float
    y: float
    z: float
    delta: float = 2.0

    @classmethod
    def canonical(cls, x: float, y: float, z: float, delta: float = 2.0) -> MarkoffTriple:
        a, b, d = sorted((x, y, z))
        return cls(a, b, d, delta)

    @property
    def residual(self) -> float:
        x, y, z = self.x, self.y, self.z
        return abs(x * x + y * y + z * z - x * y * z - 2.0 + self.delta) / max(1.0, x * y * z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def _key(t: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(f"{v:.12g}") for v in sorted(t))


def markoff_tree(
    depth: int, delta: float = 2.0, root: tuple[float, float, float] | None = None
) -> frozenset[MarkoffTriple]:
    """All triples reachable from ``root`` by at most ``depth`` Vieta flips ``x -> yz - x``."""
    if depth < 0:
        raise DomainError("depth must be >= 0")
    if root is None:
        if delta != 2.0:
            raise DomainError("a root triple is required unless delta = 2")
        root = (3.0, 3.0, 3.0)
    start = MarkoffTriple.canonical(*root, delta=delta)
    if start.residual > 1e-9:
        raise DomainError(f"root {root} does not satisfy the Markoff relation for delta={delta}")
    seen = {_key(root): start}
    queue: deque[tuple[tuple[float, float, float], int]] = deque([(tuple(map(float, root)), 0)])
    while queue:
        t, d = queue.popleft()
        if d == depth:
            continue
        for k in range(3):
            u = list(t)
            others = [t[j] for j in range(3) if j != k]
            u[k] = others[0] * others[1] - t[k]
            key = _key(u)
            if key in seen:
                continue
            triple = MarkoffTriple.canonical(*u, delta=delta)
            if triple.residual > 1e-9:
                raise ArithmeticError("Markoff relation lost precision during flips")
            seen[key] = triple
            queue.append((tuple(u), d + 1))
    return frozenset(seen.values())


FIBONACCI_A = Mat2(0.0, -1.0, -1.0, 2.0)
FIBONACCI_B = Mat2(1.0, 1.0, 1.0, 2.0)


def fibonacci_word(i: int) -> Mat2:
    """``A B^{i+1}``: its trace is ``2 y_i`` for the sequence seeded by ``(1, 2)``."""
    n = i + 1
    step = FIBONACCI_B if n >= 0 else FIBONACCI_B.inverse()
    m = FIBONACCI_A
    for _ in range(abs(n)):
        m = m @ step
    return m


def fibonacci_surface(extra: int = 8) -> tuple[Mat2, Mat2, SpectrumState]:
    """Generators of the integral punctured Klein bottle and its spectrum ``y_i = F_{2i}``."""
    return FIBONACCI_A, FIBONACCI_B, extend(spectrum_from_seed(1.0, 2.0), extra)


def spectrum_rows(state: SpectrumState) -> list[tuple[int, float, float]]:
    return [(i, state.y(i), state.length(i)) for i in state.indices()]


def write_spectrum_csv(state: SpectrumState, out: io.TextIOBase | None = None) -> str:
    """CSV with header ``index,y,length``; returns the text and writes it to ``out`` if given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "y", "length"])
    for i, y, l in spectrum_rows(state):
        w.writerow([i, repr(float(y)), repr(l)])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
