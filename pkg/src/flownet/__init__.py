"""Temporal weighted directed network analytics for migration flows.

Build a yearly network from migration events, score countries with local
(drain index, clustering, reciprocity), spectral (weighted PageRank, HITS
hubs/authorities) and path (reciprocal-weight betweenness) centralities,
compare against strength-preserving null ensembles, and export everything
as deterministic, plot-ready files.
"""

from ._kernels import BACKEND
from .analysis import (
    ClassLorenzSummary,
    RankConditionedCurve,
    Ranking,
    ReciprocitySeries,
    ThresholdStep,
    Trajectory,
    lorenz_by_class,
    pearson,
    pearson_pvalue,
    rank,
    rank_conditioned_gini,
    rank_conditioned_neighbor_cc,
    reciprocity_timeseries,
    threshold_sensitivity,
    trajectories,
)
from .export import (
    EgoNetwork,
    canonical_json,
    choropleth_csv,
    ego_network,
    scores_json,
    to_dot,
)
from .ingest import (
    AffiliationRecord,
    ParseError,
    RecordError,
    derive_events,
    parse_affiliations,
    parse_events,
    write_events,
)
from .metrics import (
    LorenzCurve,
    ScoreVector,
    UNDEFINED,
    clustering_coefficient,
    drain_index,
    gini,
    is_defined,
    lorenz,
    neighbor_weight_population,
    network_reciprocity,
    node_reciprocity,
)
from .network import (
    BuildReport,
    CountryCode,
    MigrationEvent,
    TemporalNetwork,
    TimeSlice,
    active_nodes,
    build_network,
    edge_count,
    largest_scc,
    largest_scc_size,
    threshold,
)
from .nullmodel import (
    InfeasibleSliceError,
    NullEnsemble,
    configuration_model,
    ensemble,
    ensemble_statistic,
)
from .paths import betweenness
from .spectral import IterationReport, hits, pagerank

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BuildReport",
    "ClassLorenzSummary",
    "CountryCode",
    "EgoNetwork",
    "AffiliationRecord",
    "InfeasibleSliceError",
    "IterationReport",
    "LorenzCurve",
    "MigrationEvent",
    "NullEnsemble",
    "ParseError",
    "RankConditionedCurve",
    "Ranking",
    "ReciprocitySeries",
    "RecordError",
    "ScoreVector",
    "TemporalNetwork",
    "ThresholdStep",
    "TimeSlice",
    "Trajectory",
    "UNDEFINED",
    "active_nodes",
    "betweenness",
    "build_network",
    "canonical_json",
    "choropleth_csv",
    "clustering_coefficient",
    "configuration_model",
    "derive_events",
    "drain_index",
    "edge_count",
    "ego_network",
    "ensemble",
    "ensemble_statistic",
    "gini",
    "hits",
    "is_defined",
    "largest_scc",
    "largest_scc_size",
    "lorenz",
    "lorenz_by_class",
    "neighbor_weight_population",
    "network_reciprocity",
    "node_reciprocity",
    "pagerank",
    "parse_affiliations",
    "parse_events",
    "pearson",
    "pearson_pvalue",
    "rank",
    "rank_conditioned_gini",
    "rank_conditioned_neighbor_cc",
    "reciprocity_timeseries",
    "scores_json",
    "threshold",
    "threshold_sensitivity",
    "to_dot",
    "trajectories",
    "write_events",
]
