"""Right-angled hexagons and the surfaces glued from them.

Geometry lives in the hyperboloid model ``{x : <x,x> = -1, x2 > 0}`` with
``<u,v> = u0 v0 + u1 v1 - u2 v2``. A geodesic is the intersection with a plane
through the origin, described by a unit spacelike normal ``n``. Isometries are
3x3 Lorentz matrices; the upper half-plane picture (vertices as complex numbers,
gluings as :class:`Mat2`) is produced on export.

Hexagon layout: sides ``0..5`` have lengths ``[a1, b3, a2, b1, a3, b2]`` where
``a1, a2, a3`` are the alternate sides (boundary halves) and ``b_k`` is the side
opposite ``a_k``. Side ``j`` runs from vertex ``j`` to vertex ``j+1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from ..errors import DomainError
from ..hyptrig import Mat2, fourth_length_mobius, stable_acosh

Vec = tuple[float, float, float]
Lorentz = tuple[Vec, Vec, Vec]

IDENTITY: Lorentz = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
SIGMA: Lorentz = ((1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, 1.0))
# mirror used to realise the second sheet of an orientation double cover
SHEET_MIRROR: Lorentz = ((-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def mink(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[0] + u[1] * v[1] - u[2] * v[2]


def lcross(u: Sequence[float], v: Sequence[float]) -> Vec:
    """Vector ``N`` with ``<N, w> = det(u, v, w)``; normal to the plane of ``u`` and ``v``."""
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        -(u[0] * v[1] - u[1] * v[0]),
    )


def combo(a: float, u: Sequence[float], b: float, v: Sequence[float]) -> Vec:
    return (a * u[0] + b * v[0], a * u[1] + b * v[1], a * u[2] + b * v[2])


def apply(M: Lorentz, v: Sequence[float]) -> Vec:
    return (
        M[0][0] * v[0] + M[0][1] * v[1] + M[0][2] * v[2],
        M[1][0] * v[0] + M[1][1] * v[1] + M[1][2] * v[2],
        M[2][0] * v[0] + M[2][1] * v[1] + M[2][2] * v[2],
    )


def compose(*ms: Lorentz) -> Lorentz:
    """Matrix product ``ms[0] @ ms[1] @ ...``."""
    out = IDENTITY
    for m in ms:
        out = tuple(
            tuple(sum(out[i][k] * m[k][j] for k in range(3)) for j in range(3)) for i in range(3)
        )
    return out


def reflection(n: Sequence[float]) -> Lorentz:
    """Reflection in the geodesic with unit spacelike normal ``n``: ``x -> x - 2<x,n> n``."""
    jn = (n[0], n[1], -n[2])
    return tuple(
        tuple((1.0 if i == j else 0.0) - 2.0 * n[i] * jn[j] for j in range(3)) for i in range(3)
    )


def lorentz_det(M: Lorentz) -> float:
    (a, b, c), (d, e, f), (g, h, i) = M
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    return stable_acosh(max(1.0, -mink(p, q)))


def point_on(p: Vec, t: Vec, s: float) -> tuple[Vec, Vec]:
    """Point and unit tangent at arclength ``s`` along the geodesic through ``p`` with tangent ``t``."""
    ch, sh = math.cosh(s), math.sinh(s)
    return combo(ch, p, sh, t), combo(sh, p, ch, t)


def project_to_line(x: Sequence[float], n: Sequence[float]) -> Vec:
    """Foot of the perpendicular from ``x`` to the geodesic with unit normal ``n``."""
    f = combo(1.0, x, -mink(x, n), n)
    scale = math.sqrt(-mink(f, f))
    return (f[0] / scale, f[1] / scale, f[2] / scale)


def to_disk(x: Sequence[float]) -> complex:
    return complex(x[0], x[1]) / (1.0 + x[2])


def disk_to_uhp(w: complex) -> complex:
    return 1j * (1.0 + w) / (1.0 - w)


def to_uhp(x: Sequence[float]) -> complex:
    return disk_to_uhp(to_disk(x))


def _ideal_uhp(v: Sequence[float]) -> complex:
    return disk_to_uhp(complex(v[0], v[1]) / v[2])


_PROBE = tuple((math.cos(th), math.sin(th), 1.0) for th in (0.7, 2.3, 4.4))


def _three_point(a: complex, b: complex, c: complex) -> tuple[float, float, float, float]:
    # Mobius map sending 0, 1, infinity to a, b, c (all real)
    a, b, c = a.real, b.real, c.real
    return (c * (b - a), a * (c - b), b - a, c - b)


def lorentz_to_mat2(M: Lorentz) -> Mat2:
    """Upper half-plane representative of a Lorentz isometry.

    Fitted on three ideal points; a negative determinant means the map acts by
    ``z -> (a conj(z) + b) / (c conj(z) + d)``.
    """
    src = [_ideal_uhp(v) for v in _PROBE]
    dst = [_ideal_uhp(apply(M, v)) for v in _PROBE]
    s = Mat2(*_three_point(*src))
    d = Mat2(*_three_point(*dst))
    m = d @ s.inverse()
    # the boundary fit fixes the matrix; its sign matches orientation automatically
    if (m.det_sign < 0) != (lorentz_det(M) < 0):
        raise ArithmeticError("orientation mismatch while exporting isometry")
    return m


@dataclass(frozen=True)
class Polygon:
    """Convex geodesic polygon with per-side start vertex, unit tangent and inward unit normal."""

    vertices: tuple[Vec, ...]
    tangents: tuple[Vec, ...]
    normals: tuple[Vec, ...]
    lengths: tuple[float, ...]

    @property
    def n_sides(self) -> int:
        return len(self.lengths)

    def point(self, side: int, u: float) -> Vec:
        return point_on(self.vertices[side], self.tangents[side], u)[0]

    def transformed(self, M: Lorentz) -> Polygon:
        return Polygon(
            tuple(apply(M, v) for v in self.vertices),
            tuple(apply(M, t) for t in self.tangents),
            tuple(apply(M, n) for n in self.normals),
            self.lengths,
        )

    def closure_residual(self) -> float:
        end = point_on(self.vertices[-1], self.tangents[-1], self.lengths[-1])[0]
        return max(abs(a - b) for a, b in zip(end, self.vertices[0]))

    def angle_residual(self) -> float:
        k = self.n_sides
        return max(abs(mink(self.normals[j], self.normals[(j + 1) % k])) for j in range(k))

    def side_length_residual(self) -> float:
        k = self.n_sides
        return max(
            abs(distance(self.vertices[j], self.vertices[(j + 1) % k]) - self.lengths[j])
            for j in range(k)
        )

    def uhp_vertices(self) -> tuple[complex, ...]:
        return tuple(to_uhp(v) for v in self.vertices)


def opposite_side(a: float, b: float, c: float) -> float:
    """Side of a right-angled hexagon opposite the alternate side ``a``; ``b, c`` are the other alternates."""
    arg = (math.cosh(a) + math.cosh(b) * math.cosh(c)) / (math.sinh(b) * math.sinh(c))
    return stable_acosh(arg)


def right_angled_hexagon(a1: float, a2: float, a3: float) -> Polygon:
    """Hexagon with alternate sides ``a1, a2, a3`` built by walking with left turns."""
    if not (a1 > 0 and a2 > 0 and a3 > 0):
        raise DomainError("hexagon sides must be positive")
    b1, b2, b3 = opposite_side(a1, a2, a3), opposite_side(a2, a3, a1), opposite_side(a3, a1, a2)
    lengths = (a1, b3, a2, b1, a3, b2)
    p: Vec = (0.0, 0.0, 1.0)
    t: Vec = (1.0, 0.0, 0.0)
    n: Vec = (0.0, 1.0, 0.0)
    verts, tans, norms = [], [], []
    for L in lengths:
        verts.append(p)
        tans.append(t)
        norms.append(n)
        p, t = point_on(p, t, L)
        t, n = n, (-t[0], -t[1], -t[2])
    poly = Polygon(tuple(verts), tuple(tans), tuple(norms), lengths)
    if poly.closure_residual() > 1e-8 or poly.angle_residual() > 1e-8:
        raise ArithmeticError("hexagon failed to close")
    return poly


@dataclass(frozen=True)
class Gluing:
    """Identification of side ``(source, side)`` with ``(target, target_side)``.

    ``matrix`` carries source coordinates to target coordinates. ``flip`` is
    True when arclength ``u`` on the source side corresponds to ``len - u`` on the
    target side. ``orientation`` is the sign of the Lorentz determinant.
    """

    target: int
    target_side: int
    matrix: Lorentz
    flip: bool
    orientation: int
    crosses: Optional[str] = None


@dataclass(frozen=True)
class SurfaceGeometry:
    """A surface cut into right-angled hexagons.

    ``boundary_sides`` maps ``(polygon, side)`` to the boundary index (1 is the
    launch boundary); ``gluings`` maps the remaining sides. ``launch`` lists the
    pieces ``(polygon, side, start, reversed)`` that make up boundary 1 of the
    quotient surface. For the Mobius case the polygons form the orientation
    double cover: polygons ``2, 3`` are mirror copies of ``0, 1`` and
    ``deck[p]`` is the polygon related to ``p`` by the deck involution
    ``deck_matrix``.
    """

    kind: str
    boundary_lengths: tuple[float, ...]
    polygons: tuple[Polygon, ...]
    gluings: Mapping[tuple[int, int], Gluing]
    boundary_sides: Mapping[tuple[int, int], int]
    launch: tuple[tuple[int, int, float, bool], ...]
    deck: Optional[tuple[int, ...]] = None
    deck_matrix: Optional[Lorentz] = None
    walls: Mapping[int, tuple[tuple[Vec, Vec], ...]] = MappingProxyType({})
    one_sided_lengths: Optional[tuple[float, float]] = None

    @property
    def L1(self) -> float:
        return self.boundary_lengths[0]

    def hexagons_uhp(self) -> tuple[tuple[complex, ...], ...]:
        return tuple(p.uhp_vertices() for p in self.polygons)

    def gluing_mat2(self, polygon: int, side: int) -> Mat2:
        return lorentz_to_mat2(self.gluings[(polygon, side)].matrix)

    def deck_mat2(self) -> Optional[Mat2]:
        return None if self.deck_matrix is None else lorentz_to_mat2(self.deck_matrix)

    def gluing_residual(self) -> float:
        """Largest distance between glued points, sampled at both ends and the middle of each side."""
        worst = 0.0
        for (p, s), g in self.gluings.items():
            src, dst = self.polygons[p], self.polygons[g.target]
            L = src.lengths[s]
            if abs(dst.lengths[g.target_side] - L) > 1e-8:
                return math.inf
            for u in (0.0, 0.5 * L, L):
                image = apply(g.matrix, src.point(s, u))
                expect = dst.point(g.target_side, L - u if g.flip else u)
                worst = max(worst, max(abs(a - b) for a, b in zip(image, expect)))
        return worst

    def deck_residual(self) -> float:
        """How far the deck involution is from commuting with every gluing."""
        if self.deck is None or self.deck_matrix is None:
            return 0.0
        R = self.deck_matrix
        worst = max(abs(a - b) for r1, r2 in zip(compose(R, R), IDENTITY) for a, b in zip(r1, r2))
        for (p, s), g in self.gluings.items():
            partner = self.gluings[(self.deck[p], s)]
            if partner.target != self.deck[g.target] or partner.target_side != g.target_side:
                return math.inf
            conj = compose(R, g.matrix, R)
            worst = max(
                worst,
                max(abs(a - b) for r1, r2 in zip(conj, partner.matrix) for a, b in zip(r1, r2)),
            )
        for p, poly in enumerate(self.polygons):
            image = poly.transformed(R)
            other = self.polygons[self.deck[p]]
            worst = max(
                worst,
                max(abs(a - b) for v, w in zip(image.vertices, other.vertices) for a, b in zip(v, w)),
            )
        return worst


def _seam_map(poly: Polygon, side: int) -> Lorentz:
    # from H+ across ``side`` into the mirror hexagon H- = SIGMA(H+)
    return compose(SIGMA, reflection(poly.normals[side]))


def build_pants(L1: float, L2: float, L3: float) -> SurfaceGeometry:
    """Pair of pants with boundary lengths ``L1, L2, L3`` from two mirror hexagons."""
    if not (L1 > 0 and L2 > 0 and L3 > 0):
        raise DomainError("boundary lengths must be positive")
    hp = right_angled_hexagon(L1 / 2.0, L2 / 2.0, L3 / 2.0)
    hm = hp.transformed(SIGMA)
    gluings: dict[tuple[int, int], Gluing] = {}
    for side in (1, 3, 5):
        m = _seam_map(hp, side)
        gluings[(0, side)] = Gluing(1, side, m, False, 1)
        gluings[(1, side)] = Gluing(0, side, compose(reflection(hp.normals[side]), SIGMA), False, 1)
    boundary = {(0, 0): 1, (1, 0): 1, (0, 2): 2, (1, 2): 2, (0, 4): 3, (1, 4): 3}
    launch = ((0, 0, 0.0, False), (1, 0, L1 / 2.0, True))
    return SurfaceGeometry(
        "pants",
        (L1, L2, L3),
        (hp, hm),
        MappingProxyType(gluings),
        MappingProxyType(boundary),
        launch,
    )


def build_moebius(x: float, y: float, z: float) -> SurfaceGeometry:
    """Mobius strip minus a disk, boundary lengths ``x`` (launch) and ``y``, one-sided geodesic ``z``.

    Built from the pants ``(x, y, 2z)`` whose third boundary is closed up by the
    antipodal map; that boundary becomes the one-sided geodesic ``mu`` of length
    ``z``. The surface is realised on its orientation double cover (four
    hexagons). Side 4 of each hexagon lies on ``mu``; the perpendicular from the
    midpoint of side 4 to side 1 is half of the second one-sided geodesic
    ``mu'`` of length ``z' = fourth_length_mobius(x, y, z)``.
    """
    if not (x > 0 and y > 0 and z > 0):
        raise DomainError("x, y, z must be positive")
    hp = right_angled_hexagon(x / 2.0, y / 2.0, z)
    hm = hp.transformed(SIGMA)
    R = SHEET_MIRROR
    rho4 = reflection(hp.normals[4])
    mid_point, mid_tangent = point_on(hp.vertices[4], hp.tangents[4], z / 2.0)
    # reflection in the perpendicular to side 4 at its midpoint reverses side 4
    phi = reflection(mid_tangent)
    glide = compose(SIGMA, phi, rho4)
    glide_back = compose(rho4, phi, SIGMA)

    # base gluings between H+ (0) and H- (1): (target, map, flip, crosses mu, switches sheet)
    base: dict[tuple[int, int], tuple[int, Lorentz, bool, Optional[str], bool]] = {}
    for side in (1, 3, 5):
        rho = reflection(hp.normals[side])
        base[(0, side)] = (1, compose(SIGMA, rho), False, None, False)
        base[(1, side)] = (0, compose(rho, SIGMA), False, None, False)
    base[(0, 4)] = (1, glide, True, "mu", True)
    base[(1, 4)] = (0, glide_back, True, "mu", True)

    sheet = (IDENTITY, R)
    polys = (hp, hm, hp.transformed(R), hm.transformed(R))
    gluings: dict[tuple[int, int], Gluing] = {}
    for p in range(4):
        b, sh = p % 2, p // 2
        for side in (1, 3, 4, 5):
            tb, m, flip, crosses, switch = base[(b, side)]
            tsh = 1 - sh if switch else sh
            mat = compose(sheet[tsh], m, sheet[sh])
            orient = 1 if lorentz_det(mat) > 0 else -1
            gluings[(p, side)] = Gluing(2 * tsh + tb, side, mat, flip, orient, crosses)
    boundary = {}
    for p in range(4):
        boundary[(p, 0)] = 1
        boundary[(p, 2)] = 2

    foot = project_to_line(mid_point, hp.normals[1])
    walls = {}
    for p in range(4):
        b, sh = p % 2, p // 2
        to_p = compose(sheet[sh], SIGMA if b else IDENTITY)
        walls[p] = ((apply(to_p, mid_point), apply(to_p, foot)),)
    zp = fourth_length_mobius(x, y, z)
    return SurfaceGeometry(
        "moebius_minus_disk",
        (x, y),
        polys,
        MappingProxyType(gluings),
        MappingProxyType(boundary),
        ((0, 0, 0.0, False), (1, 0, x / 2.0, True)),
        deck=(2, 3, 0, 1),
        deck_matrix=R,
        walls=MappingProxyType(walls),
        one_sided_lengths=(z, zp),
    )


def holonomy(geometry: SurfaceGeometry, crossings: Sequence[tuple[int, int]]) -> Lorentz:
    """Composite of the gluing maps met by a loop crossing the listed ``(polygon, side)`` pairs in order."""
    out = IDENTITY
    for key in crossings:
        out = compose(geometry.gluings[key].matrix, out)
    return out


def mu_prime_half_length(geometry: SurfaceGeometry) -> float:
    """Length of the wall segment in one hexagon (half of ``z'``)."""
    (a, b), = geometry.walls[0]
    return distance(a, b)
