"""Cascade simulation and following-selection experiments on follow graphs.

Arcs are stored in tweet-propagation orientation: an arc u -> v means
v follows u and therefore receives (and may retweet) u's tweets.
"""

__version__ = "0.1.0"

from .graph import (
    SocialGraph,
    DegreeStats,
    PowerLawSpec,
    load_edgelist,
    degree_stats,
    generate_configuration_graph,
)
from .prune import PrunedGraph, prune
from .condense import CondensedDag, condense, reach_set, reach_count, reader_set
from .samples import SampleBank, build_sample_bank
from .estimator import InfluenceEstimate, estimate_influence, exact_influence
from .reciprocation import ReciprocationModel
from .strategies import (
    SelectionResult,
    greedy_select,
    high_degree_select,
    random_select,
    dynamic_greedy_simulate,
    brute_force_optimal,
)
from .branching import (
    offspring_distribution,
    critical_probability,
    extinction_probability,
    sample_size_estimate,
    subcritical_mean_size,
)

__all__ = [
    "SocialGraph",
    "DegreeStats",
    "PowerLawSpec",
    "load_edgelist",
    "degree_stats",
    "generate_configuration_graph",
    "PrunedGraph",
    "prune",
    "CondensedDag",
    "condense",
    "reach_set",
    "reach_count",
    "reader_set",
    "SampleBank",
    "build_sample_bank",
    "InfluenceEstimate",
    "estimate_influence",
    "exact_influence",
    "ReciprocationModel",
    "SelectionResult",
    "greedy_select",
    "high_degree_select",
    "random_select",
    "dynamic_greedy_simulate",
    "brute_force_optimal",
    "offspring_distribution",
    "critical_probability",
    "extinction_probability",
    "sample_size_estimate",
    "subcritical_mean_size",
]
