"""Translation-invariant Gibbs measures for fertile three-state hard-core
models ("loop" and "rod") on Cayley trees."""

__version__ = "0.1.0"

from .boundary import (
    BoundaryFixedPoint,
    SolutionSet,
    lambda_cr,
    lambda_of_z,
    rhs,
    solve_all_ti,
    solve_symmetric,
)
from .closedform import branch_constants, ferrari_real_roots, positive_root, resolvent_t0
from .errors import (
    DegenerateDenominator,
    FHCError,
    InvalidParameter,
    NoPositiveResolventRoot,
    NonConvergence,
    SizeGuardExceeded,
    SpectralError,
)
from .extremality import (
    ExtremalityReport,
    Verdict,
    classify,
    kappa_gamma,
    spectrum,
    thresholds,
    transition_kernel,
)
from .model import Activity, GraphSpec, ModelParams, is_admissible, preset

__all__ = [
    "Activity", "BoundaryFixedPoint", "DegenerateDenominator", "ExtremalityReport", "FHCError",
    "GraphSpec", "InvalidParameter", "ModelParams", "NoPositiveResolventRoot", "NonConvergence",
    "SizeGuardExceeded", "SolutionSet", "SpectralError", "Verdict", "branch_constants", "classify",
    "ferrari_real_roots", "is_admissible", "kappa_gamma", "lambda_cr", "lambda_of_z",
    "positive_root", "preset", "resolvent_t0", "rhs", "solve_all_ti", "solve_symmetric",
    "spectrum", "thresholds", "transition_kernel",
]
