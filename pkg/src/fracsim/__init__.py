"""Parallel predictor-corrector solver for fractional-order systems.

The solver integrates d^alpha_i y_i = f_i(t, y) with Caputo derivatives on a
uniform grid, splitting each step's history sums across workers with
deterministic, run-to-run reproducible results.  Analysis helpers cover
convergence checking against a series oracle, strobed sampling of forced
runs, attractor cluster statistics, wall-time scaling, and dual-precision
divergence tracking.  Everything is reachable from this namespace; the
``fracsim`` command wraps the common workflows.
"""

from .analysis import (
    AttractorStats,
    BifurcationRow,
    BifurcationTable,
    StrobeSet,
    attractor_stats,
    mittag_leffler,
    strobe,
    sweep_bifurcation,
    write_stats_csv,
    write_strobe_csv,
)
from .bench import (
    SpeedupReport,
    SpeedupRow,
    TimingRow,
    TimingTable,
    speedup_report,
    time_solve,
    write_timing_csv,
)
from .cli import main, write_trajectory_csv
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    ExprError,
    FracsimError,
    NonFiniteStateError,
    SweepRunError,
    UnsupportedPrecisionError,
    ValidationError,
)
from .parallel import PartialSums, partial_sums, reduce_all, solve_parallel
from .partition import PartitionPlan
from .precision import (
    HAS_HARDWARE_EXTENDED,
    DivergenceReport,
    resolve_width,
    run_dual_precision,
    solve_with_width,
    write_divergence_csv,
)
from .problem import Problem, Trajectory, order_depth
from .solver import corrector_step, predictor_step, solve_sequential, taylor_term
from .systems import (
    DEFAULT_LCR,
    EquilibriumSet,
    LcrParams,
    RhsExpr,
    equilibria,
    g_piecewise,
    lcr_rhs,
    linear_rhs,
    make_lcr_rhs,
    make_linear_rhs,
    parse_rhs,
)
from .weights import WeightTable, build_weights, reversed_layout, tables_for_orders

__version__ = "0.1.0"

__all__ = [
    "AttractorStats",
    "BifurcationRow",
    "BifurcationTable",
    "ConfigError",
    "DEFAULT_LCR",
    "DivergenceReport",
    "EquilibriumSet",
    "ExprError",
    "FracsimError",
    "HAS_HARDWARE_EXTENDED",
    "LcrParams",
    "NonFiniteStateError",
    "PartialSums",
    "PartitionPlan",
    "Problem",
    "RhsExpr",
    "RunConfig",
    "SpeedupReport",
    "SpeedupRow",
    "StrobeSet",
    "SweepRunError",
    "TimingRow",
    "TimingTable",
    "Trajectory",
    "UnsupportedPrecisionError",
    "ValidationError",
    "WeightTable",
    "attractor_stats",
    "build_weights",
    "corrector_step",
    "equilibria",
    "g_piecewise",
    "lcr_rhs",
    "linear_rhs",
    "load_config",
    "main",
    "make_lcr_rhs",
    "make_linear_rhs",
    "mittag_leffler",
    "order_depth",
    "parse_rhs",
    "partial_sums",
    "predictor_step",
    "reduce_all",
    "resolve_width",
    "reversed_layout",
    "run_dual_precision",
    "solve_parallel",
    "solve_sequential",
    "solve_with_width",
    "speedup_report",
    "strobe",
    "sweep_bifurcation",
    "tables_for_orders",
    "taylor_term",
    "time_solve",
    "write_divergence_csv",
    "write_stats_csv",
    "write_strobe_csv",
    "write_timing_csv",
    "write_trajectory_csv",
]
