"""Joint service caching and workload scheduling for cooperating edge nodes.

The compiled core exposes the scenario generator, the water-filling
scheduler, the Gibbs-sampling caching search, the two baselines, and the
brute-force reference solvers.
"""

from edgeopt._core import (  # noqa: F401
    CachingPolicy,
    ConvexityReport,
    EdgeNode,
    GenParams,
    IceConfig,
    IceResult,
    InfeasibleError,
    Interval,
    Scenario,
    SchedulingPolicy,
    Service,
    SolveDiagnostics,
    SolveReport,
    StationaryDistribution,
    Topology,
    TopologyKind,
    TraceRecord,
    WaterfillOptions,
    check_caching_feasible,
    check_schedule_feasible,
    convexity_probe,
    empirical_stationary_distribution,
    exhaustive_caching_search,
    generate,
    greedy_caching,
    load,
    objective,
    run_greedy,
    run_ice,
    run_noncooperation,
    save,
    scenario_from_json,
    scenario_to_json,
    solve_p2,
    solve_p2_reference,
    zipf_weights,
)

__all__ = [name for name in dir() if not name.startswith("_")]
