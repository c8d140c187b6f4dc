"""carabal: sparse convex approximation via partial-coloring vector balancing."""

from ._kernels import current_backend, set_backend
from .balancing import (BalanceResult, brute_force_min_discrepancy,
                        delta_for_lp_columns, full_coloring, partial_color_pq,
                        vb_bound)
from .caratheodory import (CaraSolution, ConvexCombination, ac_bound,
                           approx_caratheodory, brute_force_ac, maurey_sample,
                           reduce_to_multiples, round_weights_to_grid)
from .linalg import (DenseMatrix, PNorm, SubspaceBasis, lp_norm,
                     orthonormal_complement_basis, sample_unit_in_subspace)
from .walk import (PartialColoringSample, WalkConfig, WalkState, build_caps,
                   min_delta, sample_partial_coloring, walk_step)

__version__ = "0.1.0"

__all__ = [
    "BalanceResult", "CaraSolution", "ConvexCombination", "DenseMatrix",
    "PNorm", "PartialColoringSample", "SubspaceBasis", "WalkConfig",
    "WalkState", "ac_bound", "approx_caratheodory", "brute_force_ac",
    "brute_force_min_discrepancy", "build_caps", "current_backend",
    "delta_for_lp_columns", "full_coloring", "lp_norm", "maurey_sample",
    "min_delta", "orthonormal_complement_basis", "partial_color_pq",
    "reduce_to_multiples", "round_weights_to_grid", "sample_partial_coloring",
    "sample_unit_in_subspace", "set_backend", "vb_bound", "walk_step",
]
