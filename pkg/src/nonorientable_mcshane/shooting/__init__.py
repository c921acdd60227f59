"""Geodesic ray shooting on pants and on a Mobius strip minus a disk."""

from .geometry import (
    Gluing,
    Polygon,
    SurfaceGeometry,
    build_moebius,
    build_pants,
    holonomy,
    lorentz_to_mat2,
    right_angled_hexagon,
)
from .partition import (
    PartitionEstimate,
    closed_form_targets,
    estimate_partition,
    run_shots,
    summarize,
    write_shots_csv,
    z_scores,
)
from .tracer import ShotClass, ShotOutcome, launch_state, shoot

__all__ = [
    "Gluing",
    "PartitionEstimate",
    "Polygon",
    "ShotClass",
    "ShotOutcome",
    "SurfaceGeometry",
    "build_moebius",
    "build_pants",
    "closed_form_targets",
    "estimate_partition",
    "holonomy",
    "launch_state",
    "lorentz_to_mat2",
    "right_angled_hexagon",
    "run_shots",
    "shoot",
    "summarize",
    "write_shots_csv",
    "z_scores",
]
