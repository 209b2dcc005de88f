"""Bandwidth-aware service placement for wireless community mesh networks.

Core pieces: a directed bandwidth-weighted graph model with max-min
(widest-path) pair bandwidths, geographic k-means clustering, the
three-phase bandwidth-aware placement heuristic with naive / random /
exact-oracle baselines, network statistics, a calibrated synthetic
topology generator, and a seeded multi-run comparison harness.
"""

from meshplace.baselines import (
    OracleBudget,
    OracleBudgetError,
    brute_force_optimal,
    naive_kmeans_placement,
    random_placement,
    stirling2,
)
from meshplace.geocluster import Partition, kmeans, project
from meshplace.harness import (
    ComparisonTable,
    ExperimentSpec,
    improvement,
    run_experiment,
)
from meshplace.netgraph import (
    GraphFormatError,
    Link,
    NetworkGraph,
    Node,
    all_pairs_bandwidth,
    load_graph_csv,
    load_graph_json,
    path_bandwidth,
    save_graph_json,
    validate,
)
from meshplace.netstats import (
    AsymmetryStats,
    CentralityReport,
    EcdfTable,
    centrality,
    ecdf,
    fit_exponential,
    link_asymmetry,
)
from meshplace.placement import (
    Placement,
    PlacementReport,
    basp,
    find_cluster_heads,
    objective,
    per_cluster_means,
    recompute_clusters,
)
from meshplace.synthgen import GenerationError, TopologyProfile, generate

__version__ = "0.1.0"

__all__ = [
    "AsymmetryStats",
    "CentralityReport",
    "ComparisonTable",
    "EcdfTable",
    "ExperimentSpec",
    "GenerationError",
    "GraphFormatError",
    "Link",
    "NetworkGraph",
    "Node",
    "OracleBudget",
    "OracleBudgetError",
    "Partition",
    "Placement",
    "PlacementReport",
    "TopologyProfile",
    "all_pairs_bandwidth",
    "basp",
    "brute_force_optimal",
    "centrality",
    "ecdf",
    "find_cluster_heads",
    "fit_exponential",
    "generate",
    "improvement",
    "kmeans",
    "link_asymmetry",
    "load_graph_csv",
    "load_graph_json",
    "naive_kmeans_placement",
    "objective",
    "path_bandwidth",
    "per_cluster_means",
    "project",
    "random_placement",
    "recompute_clusters",
    "run_experiment",
    "save_graph_json",
    "stirling2",
    "validate",
]
