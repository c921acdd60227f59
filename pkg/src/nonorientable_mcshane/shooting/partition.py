"""Monte Carlo estimate of how boundary 1 splits into type A / type B points."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..errors import DomainError, NumericalDegeneracy
from ..identities import D, R
from .geometry import SurfaceGeometry, build_moebius, build_pants
from .tracer import ShotClass, ShotOutcome, shoot

MAX_RESAMPLES = 16


@dataclass(frozen=True)
class PartitionEstimate:
    kind: str
    boundary_lengths: tuple[float, ...]
    samples: int
    max_arcs: int
    seed: int
    counts: Mapping[str, int]
    fractions: Mapping[str, float]
    ci_halfwidth: float
    first_hit: Mapping[str, float] = field(default_factory=dict)
    fact_i_violations: int = 0
    fact_ii_violations: int = 0
    resampled: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "boundary_lengths": list(self.boundary_lengths),
            "samples": self.samples,
            "max_arcs": self.max_arcs,
            "seed": self.seed,
            "counts": dict(self.counts),
            "fractions": dict(self.fractions),
            "ci_halfwidth": self.ci_halfwidth,
            "first_hit": dict(self.first_hit),
            "fact_i_violations": self.fact_i_violations,
            "fact_ii_violations": self.fact_ii_violations,
            "resampled": self.resampled,
        }


def _classes(geometry: SurfaceGeometry) -> tuple[str, ...]:
    if geometry.kind == "pants":
        return ("A", "B2", "B3", "U")
    return ("A", "B2", "U")


def _shoot_resampling(
    geometry: SurfaceGeometry, k: int, n: int, s: float, max_arcs: int, seed: int
) -> tuple[float, ShotOutcome, int]:
    width = geometry.L1 / n
    for attempt in range(MAX_RESAMPLES):
        try:
            return s, shoot(geometry, s, max_arcs), attempt
        except NumericalDegeneracy:
            # fresh point in the same stratum from a stream keyed by (seed, k, attempt)
            r = np.random.default_rng([seed, k, attempt + 1]).random()
            s = (k + r) * width
    raise NumericalDegeneracy(f"stratum {k} stayed degenerate after {MAX_RESAMPLES} draws")


def _rebuild(kind: str, params: tuple[float, ...]) -> SurfaceGeometry:
    return build_pants(*params) if kind == "pants" else build_moebius(*params)


def _geometry_params(geometry: SurfaceGeometry) -> tuple[float, ...]:
    if geometry.kind == "pants":
        return tuple(geometry.boundary_lengths)
    return (*geometry.boundary_lengths, geometry.one_sided_lengths[0])


def _chunk(args) -> list[tuple[float, ShotOutcome, int]]:
    kind, params, ks, ss, n, max_arcs, seed = args
    geometry = _rebuild(kind, params)
    return [_shoot_resampling(geometry, k, n, s, max_arcs, seed) for k, s in zip(ks, ss)]


def stratified_positions(L1: float, n_samples: int, seed: int) -> np.ndarray:
    """``s_k = (k + u_k) L1 / n`` with ``u`` drawn in one block from ``default_rng(seed)``."""
    u = np.random.default_rng(seed).random(n_samples)
    return (np.arange(n_samples) + u) * (L1 / n_samples)


def run_shots(
    geometry: SurfaceGeometry,
    n_samples: int,
    max_arcs: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> list[tuple[float, ShotOutcome, int]]:
    """Shoot one ray per stratum; returns ``(s, outcome, resample_count)`` in stratum order.

    Positions depend only on ``seed`` and the stratum index, so the result is
    identical for any ``workers``.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    positions = stratified_positions(geometry.L1, n_samples, seed).tolist()
    if workers <= 1:
        return [
            _shoot_resampling(geometry, k, n_samples, s, max_arcs, seed)
            for k, s in enumerate(positions)
        ]
    params = _geometry_params(geometry)
    bounds = np.linspace(0, n_samples, workers + 1).astype(int)
    jobs = [
        (geometry.kind, params, list(range(a, b)), positions[a:b], n_samples, max_arcs, seed)
        for a, b in zip(bounds[:-1], bounds[1:])
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chunk, jobs))
    return [item for part in parts for item in part]


def summarize(
    geometry: SurfaceGeometry,
    shots: Sequence[tuple[float, ShotOutcome, int]],
    max_arcs: int,
    seed: int,
) -> PartitionEstimate:
    n = len(shots)
    counts = {c: 0 for c in _classes(geometry)}
    first = {"mu": 0, "mu_prime": 0, "none": 0}
    fact_i = fact_ii = resampled = 0
    for _, out, attempts in shots:
        counts[out.label] += 1
        resampled += attempts > 0
        if geometry.kind != "pants":
            if out.classification is ShotClass.SELF_OR_START:
                first[out.first_one_sided_hit or "none"] += 1
                fact_i += out.first_one_sided_hit is None
            elif out.classification is ShotClass.HIT_BOUNDARY:
                fact_ii += {"mu", "mu_prime"} <= out.crossed
    fractions = {c: v / n for c, v in counts.items()}
    worst = max(p * (1.0 - p) for p in fractions.values())
    return PartitionEstimate(
        geometry.kind,
        tuple(geometry.boundary_lengths),
        n,
        max_arcs,
        seed,
        counts,
        fractions,
        3.0 * math.sqrt(max(worst, 0.25 / n) / n),
        {k: v / n for k, v in first.items()} if geometry.kind != "pants" else {},
        fact_i,
        fact_ii,
        resampled,
    )


def estimate_partition(
    geometry: SurfaceGeometry,
    n_samples: int,
    max_arcs: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> PartitionEstimate:
    shots = run_shots(geometry, n_samples, max_arcs, seed, workers)
    return summarize(geometry, shots, max_arcs, seed)


def closed_form_targets(geometry: SurfaceGeometry) -> dict[str, float]:
    """Probabilities predicted by the summand functions.

    Pants ``(x, y, z)``: A with ``D(x,y,z)/x``; the boundary of length ``z`` with
    ``1 - R(x,y,z)/x``; the boundary of length ``y`` with ``1 - R(x,z,y)/x``.
    Mobius ``(x, y; z, z')``: A with ``[R(x,2z,y) + R(x,2z',y)]/x - 1``.
    """
    if geometry.kind == "pants":
        x, y, z = geometry.boundary_lengths
        return {"A": D(x, y, z) / x, "B2": 1.0 - R(x, z, y) / x, "B3": 1.0 - R(x, y, z) / x}
    x, y = geometry.boundary_lengths
    z, zp = geometry.one_sided_lengths
    a = (R(x, 2.0 * z, y) + R(x, 2.0 * zp, y)) / x - 1.0
    return {"A": a, "B2": 1.0 - a}


def z_scores(estimate: PartitionEstimate, targets: Mapping[str, float]) -> dict[str, float]:
    """Binomial z-score of each empirical fraction against its target."""
    out = {}
    for key, p in targets.items():
        sigma = math.sqrt(p * (1.0 - p) / estimate.samples)
        f = estimate.fractions.get(key, 0.0)
        out[key] = (f - p) / sigma if sigma > 0 else (0.0 if f == p else math.inf)
    return out


def write_shots_csv(
    shots: Sequence[tuple[float, ShotOutcome, int]], out: Optional[io.TextIOBase] = None
) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "class", "arcs", "first_hit"])
    for s, o, _ in shots:
        w.writerow([repr(s), o.label, o.arcs_traced, o.first_one_sided_hit or ""])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
