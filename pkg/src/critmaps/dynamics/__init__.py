"""Numerical dynamics of g and exact one- and two-variable chart forms."""

from .basins import (
    CONFIRM,
    DEFAULT_EPS,
    DEFAULT_MAX_ITER,
    DEFAULT_SEED,
    UNRESOLVED,
    Attractor,
    BasinBatch,
    BasinResult,
    Dynamics,
    ProjPointFloat,
    attractor_permutation,
    attractor_points,
    classify,
    collapse_direction,
    coverage_stat,
    fs_distance,
    iterate,
    sample_sphere,
    thread_count,
)
from .charts import (
    INF,
    PRINTED_1D,
    Mobius,
    RationalMap1D,
    check_1d,
    halley_check,
    halley_map,
    planar_map_check,
    restricted_1d_map,
)

__all__ = [
    "CONFIRM", "DEFAULT_EPS", "DEFAULT_MAX_ITER", "DEFAULT_SEED", "UNRESOLVED",
    "Attractor", "BasinBatch", "BasinResult", "Dynamics", "ProjPointFloat",
    "attractor_permutation", "attractor_points", "classify", "collapse_direction",
    "coverage_stat", "fs_distance", "iterate", "sample_sphere", "thread_count",
    "INF", "PRINTED_1D", "Mobius", "RationalMap1D", "check_1d", "halley_check",
    "halley_map", "planar_map_check", "restricted_1d_map",
]
