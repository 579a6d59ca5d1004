"""Cross-talk minimising stabilizer sets for cluster-state verification."""

from .hctf import (
    XPattern,
    extended_tiling,
    hctf_feasible,
    kernel_basis,
    propagate_rectangular,
    propagate_triangular,
    triangle_canonical_hctf,
)
from .lattice import Lattice, build_lattice, grid, neighbors, path, tri_fixed, triangle
from .optimizer import OptimizedBasis, min_penalty_basis_exact, min_penalty_basis_heuristic
from .penalty import PenaltyBreakdown, stabilizer_penalty, total_penalty
from .planner import MeasurementPattern, checkerboard_patterns, pattern_covers, pattern_penalty, plan_patterns
from .stabilizer import (
    PauliOperator,
    StabilizerSet,
    canonical_set,
    enumerate_group,
    gf2_rank,
    multiply,
    support_stats,
    transform_set,
)

__version__ = "0.1.0"
