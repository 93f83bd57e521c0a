"""Lyapunov spectrum tools for multimodal interval maps."""
__version__ = "0.1.0"

from .errors import ComputationError, LyapspecError, ValidationError  # noqa: E402
from .map_core import (  # noqa: E402
    CriticalPoint, MonotoneBranch, MultimodalMap, builtin_map, chebyshev_map, cylinders, map_from_config,
    monotone_branch_inverses, orbit, periodic_points, quadratic_map, resolve_map, tent_map, two_slope_map,
)
from .cocycle import (  # noqa: E402
    Cocycle, alpha_sharp, build_cocycle, check_alpha_sharp_bound, clustered_subset, crossing_intervals,
    pliss_times, sigma_envelope,
)
from .pressure import (  # noqa: E402
    PressureCurve, build_pressure_curve, conformal_eigenmeasure, graph_pressure, irregular_bound, legendre_F,
    markov_graph_from_map, pressure_markov, pressure_periodic,
)
from .pullback import pull_back_tree, singular_branch_count, telescope_check  # noqa: E402
from .spectrum import compare_to_prediction, empirical_spectrum, exponent_range_audit  # noqa: E402

__all__ = [
    "ComputationError", "LyapspecError", "ValidationError",
    "CriticalPoint", "MonotoneBranch", "MultimodalMap", "builtin_map", "chebyshev_map", "cylinders",
    "map_from_config", "monotone_branch_inverses", "orbit", "periodic_points", "quadratic_map", "resolve_map",
    "tent_map", "two_slope_map",
    "Cocycle", "alpha_sharp", "build_cocycle", "check_alpha_sharp_bound", "clustered_subset",
    "crossing_intervals", "pliss_times", "sigma_envelope",
    "PressureCurve", "build_pressure_curve", "conformal_eigenmeasure", "graph_pressure", "irregular_bound",
    "legendre_F", "markov_graph_from_map", "pressure_markov", "pressure_periodic",
    "pull_back_tree", "singular_branch_count", "telescope_check",
    "compare_to_prediction", "empirical_spectrum", "exponent_range_audit",
]
