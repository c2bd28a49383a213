"""Exact solvers and reduction gadgets for connected multi-UAV coverage on topologic graphs."""
from .config import (
    Configuration,
    CoverageState,
    DisconnectedFromBase,
    DuplicateNonBase,
    all_base,
    is_connected_to_base,
    is_step,
    make_configuration,
    successors,
)
from .graph import (
    GraphFormatError,
    TopologicGraph,
    is_neighbor_communicable,
    neighbor_communicable_closure,
    parse_graph,
    serialize_graph,
    validate_graph,
)
from .search import (
    Budget,
    Plan,
    SolveOutcome,
    Verdict,
    min_uavs_for_coverage,
    solve_bcoverage,
    solve_breachability,
    solve_coverage,
    solve_reachability,
    validate_plan,
)

__version__ = "0.1.0"
