"""Splitting trees, gauge measures, antichain games, and cube transfer maps."""

from .gauge import (
    BranchSchedule,
    Gauge,
    OrderVerdict,
    FIRST_LOWER_ORDER,
    INCONCLUSIVE,
    SECOND_LOWER_ORDER,
    bound_table,
    compare_order,
    sparsity_schedule,
)
from .tree import (
    BranchSelector,
    ConstantSelector,
    ExplicitSelector,
    ExplicitTree,
    GameBuiltSelector,
    Layer,
    SeededSelector,
    SplittingTree,
)
from .hausdorff import (
    DimensionEstimate,
    MeasureCertificate,
    brute_force_cover_cost,
    dimension_estimate,
    frostman_lower,
    level_dp_cost,
    measure_certificate,
    optimal_cover_cost,
)
from .game import (
    AntichainCertificate,
    BadSet,
    BitFlipMap,
    ExplicitNodeMap,
    GameState,
    Requirement,
    ShiftMap,
    TransducerMap,
    TreeMap,
    apply_map,
    bad_set,
    run_game,
    stage_step,
    verify_escape,
)
from .transfer import (
    CoverTransferRule,
    CubePoint,
    DyadicInterval,
    deinterleave,
    dyadic_four_cover,
    expand,
    gauge_conjugate,
    interleave,
    interleave_metric_check,
    pushforward_cover,
    to_cube,
)

__version__ = "0.1.0"
