"""Entropy-aware similarity for balanced clustering of data-holding sites."""
from .balance import (
    CategoricalDistribution,
    SiteProfile,
    BalanceWeight,
    ValidationError,
    normalized_entropy,
    pair_balance,
    site_weight,
)
from .similarity import (
    BalancePoint,
    SimilarityMatrix,
    cosine_similarity,
    easb_similarity,
    euclidean_distance,
    similarity_matrix,
    symmetric_transform,
)
from .clustering import (
    Cluster,
    Partition,
    cluster_baseline,
    cluster_easb,
    evaluate_partition,
    pooled_entropy,
)
from .data import (
    ScenarioSpec,
    generate_scenario,
    ingest_histogram,
    ingest_profiles,
    ingest_records,
    load_fixture,
    load_sites,
)
from .report import BalanceReport

__version__ = "0.1.0"

__all__ = [
    "CategoricalDistribution",
    "SiteProfile",
    "BalanceWeight",
    "ValidationError",
    "normalized_entropy",
    "pair_balance",
    "site_weight",
    "BalancePoint",
    "SimilarityMatrix",
    "cosine_similarity",
    "easb_similarity",
    "euclidean_distance",
    "similarity_matrix",
    "symmetric_transform",
    "Cluster",
    "Partition",
    "cluster_baseline",
    "cluster_easb",
    "evaluate_partition",
    "pooled_entropy",
    "ScenarioSpec",
    "generate_scenario",
    "ingest_histogram",
    "ingest_profiles",
    "ingest_records",
    "load_fixture",
    "load_sites",
    "BalanceReport",
]
