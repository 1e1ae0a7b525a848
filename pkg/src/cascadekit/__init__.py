"""cascadekit: quantitative analysis of information cascades on social networks.

The pipeline: ingest a follower graph and per-story activation logs, build
temporally ordered cascade DAGs, run the influence engine (numeric tables,
exact path histograms, or a live stream), derive macroscopic metrics, detect
isomorphic node tiers, reconstruct propagation graphs from path profiles,
and fit heavy-tailed distributions to the resulting metric populations.
"""

from .distfit import (
    FAMILIES,
    ComparisonResult,
    FitConfig,
    FitResult,
    Sample,
    compare,
    dpln_cdf,
    dpln_pdf,
    family_cdf,
    fit,
    ks_statistic,
    lognormal_cdf,
    power_law_tail_cdf,
    sample_dpln,
    sample_lognormal,
    sample_power_law,
    sample_weibull,
    sample_weibull_mixture,
    weibull_cdf,
    weibull_mixture_cdf,
)
from .engine import (
    DEFAULT_ALPHA,
    CascadeRank,
    CascadeStream,
    ContagionLengthTable,
    PathProfile,
    PhiSeries,
    SeedWeights,
    StreamUpdate,
    UNIT_WEIGHTS,
    compute_path_profiles,
    compute_tables,
    phi_derivative,
    phi_series,
    rank_cascades,
)
from .errors import (
    CapabilityError,
    CascadeKitError,
    ConvergenceError,
    DegenerateSampleError,
    EnumerationBoundError,
    FitError,
    IngestionError,
    ParameterDomainError,
    ReconstructionError,
    StreamOrderError,
)
from .graph import (
    ActivationLog,
    CascadeGraph,
    FollowerGraph,
    build_cascade_graph,
    classify_seeds,
    iter_story_graphs,
    load_activation_logs,
    load_follower_graph,
    save_activation_logs,
    save_follower_graph,
)
from .metrics import (
    CascadeMetrics,
    CascadeSummary,
    PathStats,
    cascade_membership,
    diameter,
    path_stats,
    process_spread,
    spread,
    story_metrics,
)
from .oracle import (
    GeneratedInstance,
    SyntheticSpec,
    enumerate_paths,
    generate,
    generate_corpus,
    longest_path_length,
    reachable_from,
    synthetic_cascade_graph,
)
from .tiers import (
    CONFIDENCE_EXACT,
    CONFIDENCE_TIER,
    ReconstructedEdge,
    ReconstructedGraph,
    TierPartition,
    collapse_by_tier,
    reconstruct,
    tier_partition,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationLog",
    "CONFIDENCE_EXACT",
    "CONFIDENCE_TIER",
    "CapabilityError",
    "CascadeGraph",
    "CascadeKitError",
    "CascadeMetrics",
    "CascadeRank",
    "CascadeStream",
    "CascadeSummary",
    "ComparisonResult",
    "ContagionLengthTable",
    "ConvergenceError",
    "DEFAULT_ALPHA",
    "DegenerateSampleError",
    "EnumerationBoundError",
    "FAMILIES",
    "FitConfig",
    "FitError",
    "FitResult",
    "FollowerGraph",
    "GeneratedInstance",
    "IngestionError",
    "ParameterDomainError",
    "PathProfile",
    "PathStats",
    "PhiSeries",
    "ReconstructedEdge",
    "ReconstructedGraph",
    "ReconstructionError",
    "Sample",
    "SeedWeights",
    "StreamOrderError",
    "StreamUpdate",
    "SyntheticSpec",
    "TierPartition",
    "UNIT_WEIGHTS",
    "build_cascade_graph",
    "cascade_membership",
    "classify_seeds",
    "collapse_by_tier",
    "compare",
    "compute_path_profiles",
    "compute_tables",
    "diameter",
    "dpln_cdf",
    "dpln_pdf",
    "enumerate_paths",
    "family_cdf",
    "fit",
    "generate",
    "generate_corpus",
    "iter_story_graphs",
    "ks_statistic",
    "load_activation_logs",
    "load_follower_graph",
    "lognormal_cdf",
    "longest_path_length",
    "path_stats",
    "phi_derivative",
    "phi_series",
    "power_law_tail_cdf",
    "process_spread",
    "rank_cascades",
    "reachable_from",
    "reconstruct",
    "sample_dpln",
    "sample_lognormal",
    "sample_power_law",
    "sample_weibull",
    "sample_weibull_mixture",
    "save_activation_logs",
    "save_follower_graph",
    "spread",
    "story_metrics",
    "synthetic_cascade_graph",
    "tier_partition",
    "weibull_cdf",
    "weibull_mixture_cdf",
]
