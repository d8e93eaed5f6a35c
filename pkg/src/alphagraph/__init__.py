"""Alpha-reachable proximity graphs: build, search, tune by pruning, audit."""

from alphagraph.analysis import (
    BoundKind,
    ReachabilityReport,
    audit_reachability,
    beta,
    bound_after_tuning,
    gen_sorted_euclid_tight_config,
    gen_sorted_general_tight_config,
    gen_unsorted_tight_config,
    verify_lemma_a_optimum,
)
from alphagraph.build import VamanaParams, build_slow, build_vamana
from alphagraph.core import Dataset, MetricKind, aspect_ratio, gen_random_dataset, medoid
from alphagraph.graph import DegreeStats, ProximityGraph
from alphagraph.prune import UNBOUNDED, PruneParams, robust_prune, rp_tuning
from alphagraph.search import brute_force_knn, greedy_search, recall_at_k

__version__ = "0.1.0"
