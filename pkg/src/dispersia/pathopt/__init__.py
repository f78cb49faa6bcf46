"""Mountain-pass machinery on the configuration space (0, inf) x SO(3) x SO(3)."""

from .descent import (
    DescentResult,
    HypothesisError,
    PseudoMinReport,
    ResolutionError,
    descend_to_pseudo_minimum,
    negativity_at_pseudomin,
    pseudo_min_criterion,
    unit_fixture,
)
from .path import PathError, PathOnConfigSpace, path_max
from .minmax import MinMaxResult, PreconditionError, check_local_minimum, minmax_optimize
from .splice import BoundedPathResult, SpliceError, bounded_minmax_path, choose_L_cut
from .sublevel import SublevelGraph, connection_radius, sublevel_connectivity

__all__ = [
    "DescentResult",
    "HypothesisError",
    "PseudoMinReport",
    "ResolutionError",
    "descend_to_pseudo_minimum",
    "negativity_at_pseudomin",
    "pseudo_min_criterion",
    "unit_fixture",
    "PathError",
    "PathOnConfigSpace",
    "path_max",
    "MinMaxResult",
    "PreconditionError",
    "check_local_minimum",
    "minmax_optimize",
    "BoundedPathResult",
    "SpliceError",
    "bounded_minmax_path",
    "choose_L_cut",
    "SublevelGraph",
    "connection_radius",
    "sublevel_connectivity",
]
