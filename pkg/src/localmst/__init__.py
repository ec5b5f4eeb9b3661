"""Local search towards minimum spanning trees of randomly weighted complete graphs."""

from .distributions import (
    UNIFORM,
    EdgeWeightDistribution,
    PiecewiseLinear,
    TruncatedExponential,
    Uniform,
    parse_distribution,
)
from .eating import (
    VoronoiPartition,
    absorb_leaf,
    absorb_vertex,
    bfs_increment_order,
    eat,
    remove_cycles,
    voronoi_partition,
)
from .errors import BudgetExceeded, DistributionError, GraphError, InvalidParameter, LocalMSTError
from .graphs import (
    EdgeId,
    SpanningSubgraph,
    WeightedCompleteGraph,
    edge_endpoints,
    edge_index,
    load_graph,
    make_fixed_graph,
    make_start_graph,
    sample_graph,
    save_graph,
)
from .kruskal import (
    KruskalTrace,
    ThresholdSnapshot,
    alpha,
    check_reduced_mst_bound,
    connectivity_probability_bound,
    kruskal_trace,
    mst,
    snapshot,
    snapshot_at,
)
from .oracle import exact_cost, reachable_under, threshold_cost
from .search import (
    OptimizingSequence,
    SequenceTrace,
    check_persistence,
    cost1_bounds,
    heavy_edge_floor,
    phi,
    run_sequence,
)
from .starpath import (
    Labeling,
    RunIndex,
    USequence,
    canonical_labeling,
    full_pipeline,
    good_sets_scan,
    run_index,
    run_index_tail_check,
    solve_star_or_path,
    u_sequence,
)
from .trees import TreeView, diam, tree_path, wdiam
from .witness import StructuralWitness, find_witness, pivot_ramsey
from .experiments import ZETA3, ExperimentConfig, run_experiment

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "DistributionError",
    "EdgeId",
    "EdgeWeightDistribution",
    "ExperimentConfig",
    "GraphError",
    "InvalidParameter",
    "KruskalTrace",
    "Labeling",
    "LocalMSTError",
    "OptimizingSequence",
    "PiecewiseLinear",
    "RunIndex",
    "SequenceTrace",
    "SpanningSubgraph",
    "StructuralWitness",
    "ThresholdSnapshot",
    "TreeView",
    "TruncatedExponential",
    "UNIFORM",
    "USequence",
    "Uniform",
    "VoronoiPartition",
    "WeightedCompleteGraph",
    "ZETA3",
    "absorb_leaf",
    "absorb_vertex",
    "alpha",
    "bfs_increment_order",
    "canonical_labeling",
    "check_persistence",
    "check_reduced_mst_bound",
    "connectivity_probability_bound",
    "cost1_bounds",
    "diam",
    "eat",
    "edge_endpoints",
    "edge_index",
    "exact_cost",
    "find_witness",
    "full_pipeline",
    "good_sets_scan",
    "heavy_edge_floor",
    "kruskal_trace",
    "load_graph",
    "make_fixed_graph",
    "make_start_graph",
    "mst",
    "parse_distribution",
    "phi",
    "pivot_ramsey",
    "reachable_under",
    "remove_cycles",
    "run_experiment",
    "run_index",
    "run_index_tail_check",
    "run_sequence",
    "sample_graph",
    "save_graph",
    "snapshot",
    "snapshot_at",
    "solve_star_or_path",
    "threshold_cost",
    "tree_path",
    "u_sequence",
    "voronoi_partition",
    "wdiam",
]
