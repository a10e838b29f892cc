"""seqlens: multilevel overviews of temporal event sequences.

The pipeline: parse an event log, deduplicate it into frequency-weighted
unique sequences, aggregate those bottom-up into a binary merge tree whose
nodes carry multiple sequence alignments, score and simplify each node's
alignment per information threshold, and recommend cluster counts from the
average silhouette width curve. A FastAPI service and a CLI expose the
pipeline for interactive exploration.
"""

__version__ = "0.1.0"

from .alignment import AlignmentMatrix, AlignParams, pairwise_align, recover_sequence
from .aggtree import (
    AggregateTree,
    Frontier,
    TreeNode,
    aggregate,
    build_aggregate_tree,
    cut_at_k,
    split_node,
)
from .config import EngineConfig, load_config
from .distance import (
    DistanceMatrix,
    QGramProfile,
    average_linkage,
    distance_matrix,
    qgram_distance,
    qgram_profile,
)
from .ingest import (
    Alphabet,
    EventLog,
    EventType,
    IndividualRecord,
    UniqueSequence,
    UniqueSequenceSet,
    deduplicate,
    parse_event_log,
)
from .quality import (
    SilhouetteCurve,
    average_silhouette_width,
    recommend_k,
    silhouette_curve,
    silhouette_value,
)
from .representation import (
    ClusterView,
    ColumnDistribution,
    InfoScoreVector,
    SimplifiedMatrix,
    column_distribution,
    column_entropy,
    information_scores,
    simplify,
)
from .analytics import (
    Filter,
    Selection,
    StackedBarData,
    align_by_event,
    apply_filters,
    attribute_aggregate,
    filter_signature,
)

__all__ = [
    "AggregateTree",
    "AlignParams",
    "AlignmentMatrix",
    "Alphabet",
    "ClusterView",
    "ColumnDistribution",
    "DistanceMatrix",
    "EngineConfig",
    "EventLog",
    "EventType",
    "Filter",
    "Frontier",
    "IndividualRecord",
    "InfoScoreVector",
    "QGramProfile",
    "Selection",
    "SilhouetteCurve",
    "SimplifiedMatrix",
    "StackedBarData",
    "TreeNode",
    "UniqueSequence",
    "UniqueSequenceSet",
    "aggregate",
    "align_by_event",
    "apply_filters",
    "attribute_aggregate",
    "average_linkage",
    "average_silhouette_width",
    "build_aggregate_tree",
    "column_distribution",
    "column_entropy",
    "cut_at_k",
    "deduplicate",
    "distance_matrix",
    "filter_signature",
    "information_scores",
    "load_config",
    "pairwise_align",
    "parse_event_log",
    "qgram_distance",
    "qgram_profile",
    "recommend_k",
    "recover_sequence",
    "silhouette_curve",
    "silhouette_value",
    "simplify",
    "split_node",
]
