"""S_n-equivariant critically finite maps on CP^{n-2}: exact checks and basin dynamics."""

__version__ = "0.1.0"

from .exactpoly import NotDivisible, Poly, UsageError, elem_sym
from .group import generators, orbit, orbit_table, special_points
from .mapfamily import MapFamily, SubspaceSpec, build_map, compile_float, restrict
from .verify import CHECKS, CheckReport, run_check

__all__ = [
    "__version__", "NotDivisible", "Poly", "UsageError", "elem_sym",
    "generators", "orbit", "orbit_table", "special_points",
    "MapFamily", "SubspaceSpec", "build_map", "compile_float", "restrict",
    "CHECKS", "CheckReport", "run_check",
]
