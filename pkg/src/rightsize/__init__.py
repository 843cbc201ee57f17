"""Cold-start rightsizing of clusters for time-limited tasks."""
from .bench import no_timeline_bound, no_timeline_ratio
from .costs import CostParams, GenSpec, generate_synthetic, node_cost
from .ingest import ingest_trace
from .lp import (
    build_lp,
    fractionality_report,
    lower_bound,
    round_mapping,
    solve_lp,
    solve_mapping_lp,
)
from .model import (
    Instance,
    InfeasibleTaskError,
    Node,
    NodeType,
    Solution,
    StructuralError,
    Task,
    is_active,
    solution_cost,
    trim_timeline,
    verify_solution,
)
from .oracle import BudgetExceeded, OracleLimits, exact_opt
from .penmap import best_mapping, congestion, penalty, relative_demand_avg, relative_demand_max
from .placement import SolveConfig, cross_fill, place_group, solve, solve_preset, solve_two_phase

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "CostParams", "GenSpec", "InfeasibleTaskError", "Instance", "Node", "NodeType",
    "OracleLimits", "Solution", "SolveConfig", "StructuralError", "Task", "best_mapping", "build_lp",
    "congestion", "cross_fill", "exact_opt", "fractionality_report", "generate_synthetic", "ingest_trace",
    "is_active", "lower_bound", "no_timeline_bound", "no_timeline_ratio", "node_cost", "penalty",
    "place_group", "relative_demand_avg", "relative_demand_max", "round_mapping", "solution_cost",
    "solve", "solve_lp", "solve_mapping_lp", "solve_preset", "solve_two_phase", "trim_timeline",
    "verify_solution",
]
