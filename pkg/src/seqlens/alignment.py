"""Progressive profile alignment.

A cluster's alignment is built pairwise from its children's alignments
(sequence vs sequence, sequence vs alignment, or alignment vs alignment),
using global dynamic programming over alignment columns. Column-vs-column
scores are frequency-weighted sums over symbol pairs:

    score(colA, colB) = sum over (a, b) of wA[a] * wB[b] * s(a, b)

where ``s(a, b)`` is ``match_score`` if a == b, ``mismatch_score`` if both
are events and differ, and 0 if either is a gap; ``w`` are unique-sequence
frequencies normalized by the column's total frequency. For two single
sequences this reduces to plain match/mismatch scoring. Every inserted gap
column costs ``gap_open_penalty`` (linear gap model).

DP tie-breaking is fixed (prefer substitution, then a gap inserted into the
right-hand side, then into the left) so identical inputs always produce an
identical alignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RowOutOfRange

_DIAG, _UP, _LEFT = 0, 1, 2


@dataclass(frozen=True)
class AlignParams:
    gap_open_penalty: float = 0.8
    match_score: float = 3.0
    mismatch_score: float = -1.0

    def __post_init__(self) -> None:
        if not self.match_score > self.mismatch_score:
            raise ValueError("match_score must exceed mismatch_score")
        if self.gap_open_penalty < 0:
            raise ValueError("gap_open_penalty must be non-negative")


@dataclass(frozen=True)
class AlignmentMatrix:
    """Rows of event ids with gap symbols inserted; one row per unique sequence."""

    rows: np.ndarray  # (n, M) int32 of event ids; gap cells hold `gap`
    row_sequence_ids: tuple[int, ...]
    row_freqs: tuple[int, ...]
    gap: int

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def M(self) -> int:
        return int(self.rows.shape[1])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AlignmentMatrix)
            and self.gap == other.gap
            and self.row_sequence_ids == other.row_sequence_ids
            and self.row_freqs == other.row_freqs
            and self.rows.shape == other.rows.shape
            and bool(np.array_equal(self.rows, other.rows))
        )


def single_sequence_alignment(
    sequence: tuple[int, ...] | list[int],
    sequence_id: int,
    frequency: int,
    gap: int,
) -> AlignmentMatrix:
    rows = np.asarray([list(sequence)], dtype=np.int32).reshape(1, len(sequence))
    return AlignmentMatrix(
        rows=rows,
        row_sequence_ids=(sequence_id,),
        row_freqs=(frequency,),
        gap=gap,
    )


def recover_sequence(matrix: AlignmentMatrix, row: int) -> list[int]:
    """A row with its gap symbols removed: the original unique sequence."""
    if row < 0 or row >= matrix.n:
        raise RowOutOfRange(f"row {row} outside alignment with {matrix.n} rows")
    r = matrix.rows[row]
    return [int(x) for x in r[r != matrix.gap]]


def _column_weights(matrix: AlignmentMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Per-column normalized event weights (gap excluded) and non-gap mass."""
    n, m = matrix.rows.shape
    n_symbols = int(matrix.rows.max(initial=0)) + 1 if m else 1
    weights = np.zeros((m, n_symbols), dtype=np.float64)
    total = float(sum(matrix.row_freqs))
    cols = np.arange(m)
    for r in range(n):
        syms = matrix.rows[r]
        mask = syms != matrix.gap
        np.add.at(weights, (cols[mask], syms[mask]), matrix.row_freqs[r])
    weights /= total
    return weights, weights.sum(axis=1)


def _column_scores(
    a: AlignmentMatrix, b: AlignmentMatrix, params: AlignParams
) -> np.ndarray:
    wa, mass_a = _column_weights(a)
    wb, mass_b = _column_weights(b)
    k = max(wa.shape[1], wb.shape[1])
    if wa.shape[1] < k:
        wa = np.pad(wa, ((0, 0), (0, k - wa.shape[1])))
    if wb.shape[1] < k:
        wb = np.pad(wb, ((0, 0), (0, k - wb.shape[1])))
    both = wa @ wb.T
    return params.match_score * both + params.mismatch_score * (
        np.outer(mass_a, mass_b) - both
    )


def _dp(a: AlignmentMatrix, b: AlignmentMatrix, params: AlignParams):
    """Fill the DP table; returns (final score, pointer table)."""
    ma, mb = a.M, b.M
    gap = params.gap_open_penalty
    scores = _column_scores(a, b, params).tolist() if ma and mb else []
    prev = [-gap * j for j in range(mb + 1)]
    pointers = np.empty((ma + 1, mb + 1), dtype=np.uint8)
    pointers[0, :] = _LEFT
    pointers[:, 0] = _UP
    for i in range(1, ma + 1):
        row_scores = scores[i - 1] if scores else []
        cur = [0.0] * (mb + 1)
        cur[0] = -gap * i
        prow = pointers[i]
        for j in range(1, mb + 1):
            diag = prev[j - 1] + row_scores[j - 1]
            up = prev[j] - gap
            left = cur[j - 1] - gap
            if diag >= up and diag >= left:
                cur[j] = diag
                prow[j] = _DIAG
            elif up >= left:
                cur[j] = up
                prow[j] = _UP
            else:
                cur[j] = left
                prow[j] = _LEFT
        prev = cur
    return prev[mb], pointers


def alignment_score(
    a: AlignmentMatrix, b: AlignmentMatrix, params: AlignParams | None = None
) -> float:
    """Optimal global alignment score of the two alignments."""
    params = params or AlignParams()
    score, _ = _dp(a, b, params)
    return float(score)


def pairwise_align(
    a: AlignmentMatrix, b: AlignmentMatrix, params: AlignParams | None = None
) -> AlignmentMatrix:
    """Globally align two alignments into one covering both row sets.

    Output rows are A's rows followed by B's rows; all-gap columns are
    inserted consistently per side, so stripping gaps from any row recovers
    its original unique sequence unchanged.
    """
    params = params or AlignParams()
    if a.gap != b.gap:
        raise ValueError("alignments use different gap symbols")
    if set(a.row_sequence_ids) & set(b.row_sequence_ids):
        raise ValueError("alignments share unique-sequence rows")

    _, pointers = _dp(a, b, params)
    a_cols: list[int] = []
    b_cols: list[int] = []
    i, j = a.M, b.M
    while i > 0 or j > 0:
        move = pointers[i, j] if (i > 0 and j > 0) else (_UP if j == 0 else _LEFT)
        if move == _DIAG:
            i -= 1
            j -= 1
            a_cols.append(i)
            b_cols.append(j)
        elif move == _UP:
            i -= 1
            a_cols.append(i)
            b_cols.append(-1)
        else:
            j -= 1
            a_cols.append(-1)
            b_cols.append(j)
    a_cols.reverse()
    b_cols.reverse()

    length = len(a_cols)
    out = np.full((a.n + b.n, length), a.gap, dtype=np.int32)
    a_dst = [t for t in range(length) if a_cols[t] >= 0]
    b_dst = [t for t in range(length) if b_cols[t] >= 0]
    if a_dst:
        out[: a.n, a_dst] = a.rows[:, [a_cols[t] for t in a_dst]]
    if b_dst:
        out[a.n :, b_dst] = b.rows[:, [b_cols[t] for t in b_dst]]
    return AlignmentMatrix(
        rows=out,
        row_sequence_ids=a.row_sequence_ids + b.row_sequence_ids,
        row_freqs=a.row_freqs + b.row_freqs,
        gap=a.gap,
    )
