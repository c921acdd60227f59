"""Perpendicular geodesic ray tracer.

A ray leaves boundary 1 perpendicularly and is followed hexagon by hexagon.
It stops as type A when it returns to boundary 1 or crosses an earlier arc of
itself, as type B when it reaches another boundary, and as unresolved when the
arc budget runs out. Self-crossings are tested per hexagon: a new arc is
compared with earlier arcs in the same hexagon and, on a double cover, with
the deck images of arcs in the partner hexagon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..errors import DomainError, NumericalDegeneracy
from .geometry import SurfaceGeometry, Vec, apply, lcross, mink

VERTEX_TOL = 1e-12


class ShotClass(str, Enum):
    SELF_OR_START = "A"
    HIT_BOUNDARY = "B"
    UNRESOLVED = "U"


@dataclass(frozen=True)
class ShotOutcome:
    classification: ShotClass
    boundary: Optional[int]
    arcs_traced: int
    path_length: float
    first_one_sided_hit: Optional[str] = None
    crossed: frozenset = frozenset()
    stop: str = ""

    def __post_init__(self) -> None:
        if self.classification is ShotClass.HIT_BOUNDARY and self.boundary == 1:
            raise ValueError("the launch boundary is never a type B outcome")

    @property
    def label(self) -> str:
        if self.classification is ShotClass.HIT_BOUNDARY:
            return f"B{self.boundary}"
        return self.classification.value


def _segments_cross(a1: Vec, b1: Vec, a2: Vec, b2: Vec) -> bool:
    """Strict crossing of the geodesic segments ``[a1, b1]`` and ``[a2, b2]``."""
    n1 = lcross(a1, b1)
    s_a, s_b = mink(n1, a2), mink(n1, b2)
    if s_a * s_b >= 0.0:
        return False
    n2 = lcross(a2, b2)
    return mink(n2, a1) * mink(n2, b1) < 0.0


def launch_state(geometry: SurfaceGeometry, s: float) -> tuple[int, int, Vec, Vec]:
    """Polygon, side, point and inward direction for arclength ``s`` on boundary 1."""
    if not 0.0 <= s < geometry.L1:
        raise DomainError(f"s must lie in [0, {geometry.L1})")
    for poly_idx, side, start, reverse in geometry.launch:
        poly = geometry.polygons[poly_idx]
        length = poly.lengths[side]
        if start <= s < start + length:
            u = s - start
            if reverse:
                u = length - u
            if u < VERTEX_TOL or length - u < VERTEX_TOL:
                raise NumericalDegeneracy("launch point is a hexagon vertex")
            v, t = poly.vertices[side], poly.tangents[side]
            ch, sh = math.cosh(u), math.sinh(u)
            point = (ch * v[0] + sh * t[0], ch * v[1] + sh * t[1], ch * v[2] + sh * t[2])
            return poly_idx, side, point, poly.normals[side]
    raise DomainError("launch parameter not covered")


def shoot(
    geometry: SurfaceGeometry, s: float, max_arcs: int = 200, record: Optional[list] = None
) -> ShotOutcome:
    """Trace the perpendicular from arclength ``s`` on boundary 1.

    ``record``, when given, receives ``(polygon, start, end)`` for every arc.
    Raises :class:`NumericalDegeneracy` when an arc exits within ``1e-12`` of a
    vertex.
    """
    if max_arcs < 0:
        raise DomainError("max_arcs must be >= 0")
    poly_idx, entry, p, t = launch_state(geometry, s)
    polys = geometry.polygons
    gluings = geometry.gluings
    bsides = geometry.boundary_sides
    deck = geometry.deck
    R = geometry.deck_matrix
    walls = geometry.walls
    arcs: dict[int, list[tuple[Vec, Vec]]] = {i: [] for i in range(len(polys))}
    crossed: set[str] = set()
    first: Optional[str] = None
    path = 0.0

    for k in range(max_arcs):
        poly = polys[poly_idx]
        best = math.inf
        best_side = -1
        for j in range(poly.n_sides):
            if j == entry:
                continue
            nj = poly.normals[j]
            d = t[0] * nj[0] + t[1] * nj[1] - t[2] * nj[2]
            if d >= 0.0:
                continue
            r = (p[0] * nj[0] + p[1] * nj[1] - p[2] * nj[2]) / -d
            if r < best:
                best, best_side = r, j
        if best_side < 0 or best >= 1.0:
            raise NumericalDegeneracy("ray left the hexagon without meeting a side")
        length = math.atanh(max(best, 0.0))
        ch, sh = math.cosh(length), math.sinh(length)
        q = (ch * p[0] + sh * t[0], ch * p[1] + sh * t[1], ch * p[2] + sh * t[2])
        tq = (sh * p[0] + ch * t[0], sh * p[1] + ch * t[1], sh * p[2] + ch * t[2])
        tj = poly.tangents[best_side]
        u = math.asinh(q[0] * tj[0] + q[1] * tj[1] - q[2] * tj[2])
        if u < VERTEX_TOL or poly.lengths[best_side] - u < VERTEX_TOL:
            raise NumericalDegeneracy("ray passes within 1e-12 of a hexagon vertex")
        path += length
        if record is not None:
            record.append((poly_idx, p, q))

        # one-sided wall crossing inside this arc happens before the exit
        for a, b in walls.get(poly_idx, ()):
            if _segments_cross(p, q, a, b):
                crossed.add("mu_prime")
                if first is None:
                    first = "mu_prime"

        # self-crossing with earlier arcs in this hexagon and with deck images
        hit_self = False
        for a, b in arcs[poly_idx]:
            if _segments_cross(p, q, a, b):
                hit_self = True
                break
        if not hit_self and deck is not None:
            for a, b in arcs[deck[poly_idx]]:
                if _segments_cross(p, q, apply(R, a), apply(R, b)):
                    hit_self = True
                    break
        if hit_self:
            return ShotOutcome(
                ShotClass.SELF_OR_START, None, k + 1, path, first, frozenset(crossed), "self"
            )
        arcs[poly_idx].append((p, q))

        key = (poly_idx, best_side)
        if key in bsides:
            index = bsides[key]
            if index == 1:
                return ShotOutcome(
                    ShotClass.SELF_OR_START, None, k + 1, path, first, frozenset(crossed), "start"
                )
            return ShotOutcome(
                ShotClass.HIT_BOUNDARY, index, k + 1, path, first, frozenset(crossed), "boundary"
            )
        g = gluings[key]
        if g.crosses is not None:
            crossed.add(g.crosses)
            if first is None:
                first = g.crosses
        poly_idx, entry = g.target, g.target_side
        p, t = apply(g.matrix, q), apply(g.matrix, tq)

    return ShotOutcome(
        ShotClass.UNRESOLVED, None, max_arcs, path, first, frozenset(crossed), "cap"
    )
