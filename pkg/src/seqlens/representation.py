"""Column scoring and simplification of alignment matrices.

Each alignment column gets an information score in [0, 1]:

    I_j = 1 - E_j / log2(|A| + 1)

where |A| counts the distinct event types appearing anywhere in the node's
alignment and E_j is the column entropy. Gap cells enter the entropy with a
modified term -P log2(P / G_j) where P is the frequency-weighted gap
probability and G_j the raw count of gap rows (implemented verbatim, no
renormalization). E_j is clamped to log2(|A| + 1) so scores never go
negative.

Simplification sweeps the columns left to right once: whenever two
consecutive columns both score below the threshold, the left column's
content is folded into the right one and the left column is dropped. Scores
are not recomputed during the sweep. Merged cells keep events in row order;
gap symbols are dropped from merged content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alignment import AlignmentMatrix
from .errors import ColumnOutOfRange

@dataclass(frozen=True)
class ColumnDistribution:
    # symbol id (or the gap id) -> frequency-weighted probability
    probs: dict[int, float]
    gap_count: int
    gap_id: int


@dataclass(frozen=True)
class InfoScoreVector:
    scores: tuple[float, ...]
    alphabet_size: int  # distinct event types present in this alignment


@dataclass(frozen=True)
class SimplifiedMatrix:
    # cells[i][j] is the ordered tuple of event ids in row i, column j;
    # an empty tuple renders as a gap
    cells: tuple[tuple[tuple[int, ...], ...], ...]
    # per output column, the inclusive range of original columns it absorbed
    column_origin: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def M(self) -> int:
        return len(self.column_origin)

    def merged_columns(self) -> list[bool]:
        return [end > start for start, end in self.column_origin]


@dataclass(frozen=True)
class ClusterView:
    node_id: int
    cells: tuple[tuple[tuple[int, ...], ...], ...]
    row_sequence_ids: tuple[int, ...]
    row_freqs: tuple[int, ...]
    merged_columns: tuple[bool, ...]
    column_origin: tuple[tuple[int, int], ...]
    record_count: int
    record_share: float
    small_cluster: bool

    def merged_flags(self) -> list[list[bool]]:
        """Per-cell merged flags (a cell is merged iff its column is)."""
        return [list(self.merged_columns) for _ in range(len(self.cells))]


def column_distribution(
    matrix: AlignmentMatrix, j: int, freqs: Sequence[int] | None = None
) -> ColumnDistribution:
    """Frequency-weighted symbol probabilities of column j.

    The probability of a symbol is the summed frequency of the rows bearing
    it divided by the column's total frequency; gap_count is the raw
    (unweighted) number of gap rows.
    """
    if j < 0 or j >= matrix.M:
        raise ColumnOutOfRange(f"column {j} outside alignment with M={matrix.M}")
    freqs = list(freqs) if freqs is not None else list(matrix.row_freqs)
    total = float(sum(freqs))
    column = matrix.rows[:, j]
    probs: dict[int, float] = {}
    gap_count = 0
    for sym, f in zip(column, freqs):
        sym = int(sym)
        probs[sym] = probs.get(sym, 0.0) + f / total
        if sym == matrix.gap:
            gap_count += 1
    return ColumnDistribution(probs=probs, gap_count=gap_count, gap_id=matrix.gap)


def column_entropy(dist: ColumnDistribution) -> float:
    """Entropy of a column; gap probability is divided by the gap count
    inside the log term. Zero-probability symbols contribute nothing."""
    entropy = 0.0
    for sym, p in dist.probs.items():
        if p <= 0.0:
            continue
        if sym == dist.gap_id:
            entropy += -p * math.log2(p / dist.gap_count)
        else:
            entropy += -p * math.log2(p)
    return entropy


def information_scores(
    matrix: AlignmentMatrix, freqs: Sequence[int] | None = None
) -> InfoScoreVector:
    """Per-column information scores of an alignment.

    The normalizer uses the count of distinct event types in this alignment
    (not the global alphabet); entropies above the normalizer are clamped so
    scores stay within [0, 1].
    """
    symbols = np.unique(matrix.rows)
    alphabet_size = int((symbols != matrix.gap).sum())
    cap = math.log2(alphabet_size + 1)
    scores = []
    for j in range(matrix.M):
        entropy = column_entropy(column_distribution(matrix, j, freqs))
        scores.append(1.0 - min(entropy, cap) / cap)
    return InfoScoreVector(scores=tuple(scores), alphabet_size=alphabet_size)


def simplify(
    matrix: AlignmentMatrix, info: InfoScoreVector, threshold: float
) -> SimplifiedMatrix:
    """Merge runs of consecutive low-information columns.

    A column j is folded into j+1 when both score below the threshold; the
    decision uses the original scores only, so a run of r consecutive
    low-score columns collapses into the column that follows the run. An
    isolated low-score column is never merged.
    """
    m = matrix.M
    if len(info.scores) != m:
        raise ValueError(f"score vector has {len(info.scores)} entries for M={m}")
    scores = info.scores
    removed = [
        scores[j] < threshold and scores[j + 1] < threshold for j in range(m - 1)
    ]

    origins: list[tuple[int, int]] = []
    start = 0
    for j in range(m):
        if j < m - 1 and removed[j]:
            continue
        origins.append((start, j))
        start = j + 1

    gap = matrix.gap
    rows = matrix.rows
    cells = tuple(
        tuple(
            tuple(int(s) for s in rows[i, s0 : e0 + 1] if s != gap)
            for s0, e0 in origins
        )
        for i in range(matrix.n)
    )
    return SimplifiedMatrix(cells=cells, column_origin=tuple(origins))


def build_cluster_view(
    node_id: int,
    matrix: AlignmentMatrix,
    simplified: SimplifiedMatrix,
    record_count: int,
    total_records: int,
    small_cluster_threshold: float,
) -> ClusterView:
    share = record_count / total_records if total_records else 0.0
    return ClusterView(
        node_id=node_id,
        cells=simplified.cells,
        row_sequence_ids=matrix.row_sequence_ids,
        row_freqs=matrix.row_freqs,
        merged_columns=tuple(simplified.merged_columns()),
        column_origin=simplified.column_origin,
        record_count=record_count,
        record_share=share,
        small_cluster=share < small_cluster_threshold,
    )
