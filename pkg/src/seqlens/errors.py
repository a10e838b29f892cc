"""Exception types raised by the engine.

Every error that crosses a module boundary is a subclass of EngineError so
callers (CLI, HTTP service) can map them to exit codes / status codes in one
place.
"""


class EngineError(Exception):
    """Base class for all engine errors."""


# --- ingest ---------------------------------------------------------------

class EmptyDataset(EngineError):
    """The events file contained a header but no data rows."""


class MalformedRow(EngineError):
    """A CSV row had the wrong arity or an unparseable field."""


class UnknownRecord(EngineError):
    """An attribute row referenced a record_id absent from the events file."""


# --- distance -------------------------------------------------------------

class EmptySequence(EngineError):
    """A sequence is too short to produce a q-gram profile (len < q)."""


class QMismatch(EngineError):
    """Two q-gram profiles with different q were compared."""


class OverlappingClusters(EngineError):
    """Cluster distance requested for non-disjoint clusters."""


# --- alignment / representation -------------------------------------------

class RowOutOfRange(EngineError):
    """Row index outside an alignment matrix."""


class ColumnOutOfRange(EngineError):
    """Column index outside an alignment matrix."""


# --- tree -----------------------------------------------------------------

class SingleSequence(EngineError):
    """Tree build requested for a single unique sequence (degenerate tree)."""


class KOutOfRange(EngineError):
    """Requested cluster count k outside the valid range."""


class UnknownNode(EngineError):
    """Node id not present in the aggregate tree."""


class LeafNotSplittable(EngineError):
    """Attempted to split a leaf node."""


class NodeNotInFrontier(EngineError):
    """Attempted to split a node that is not part of the current frontier."""


# --- quality ---------------------------------------------------------------

class DegeneratePartition(EngineError):
    """Silhouette requested for a partition with fewer than 2 clusters."""


# --- analytics -------------------------------------------------------------

class UnknownAttribute(EngineError):
    """Filter or aggregation referenced an attribute absent from the schema."""


class TypeMismatch(EngineError):
    """Filter operator or value incompatible with the attribute's type."""


class UnknownId(EngineError):
    """Selection referenced an id absent from the active dataset."""


class EmptyResult(EngineError):
    """A filter combination removed every record; no tree can be built."""


# --- service ----------------------------------------------------------------

class BadThreshold(EngineError):
    """Information-score threshold outside [0, 1]."""
