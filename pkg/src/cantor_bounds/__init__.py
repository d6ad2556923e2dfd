"""Certified bounds on the Hausdorff measure of powers of the middle-thirds Cantor set."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    EnumerationBudgetExceeded,
    LatticeCorner,
    SquaredDistance,
    SymbolString,
    canonical_quadrant_classes,
    center_distance_sq,
    corner_of,
    kappa,
    kappa_inv,
    min_quadrant_distance,
    pair_distance_sq,
    restricted_corner_stream,
)
from .lower import (  # noqa: E402
    LowerBoundChain,
    RefinementStep,
    RepulsiveGraph,
    ReplayError,
    W_eval,
    build_repulsive_graph,
    max_matching,
    measure_cap,
    refine_lower_bound,
    replay_d3,
)
from .numerics import BoundContext, BoundResult, dimension, naive_upper, pow_directed  # noqa: E402
from .upper import DistanceHistogram, build_histogram, max_depth, upper_bound  # noqa: E402
