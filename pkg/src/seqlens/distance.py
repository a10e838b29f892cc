"""q-gram profiles, cosine sequence distance, and average-linkage distance.

The pairwise distance between two sequences is the cosine distance of their
q-gram count vectors (q=1 by default), so sequences sharing the same event
multiset are at distance zero regardless of event order. Cluster-to-cluster
distance is the mean of all cross-cluster pairwise distances.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySequence, OverlappingClusters, QMismatch
from .ingest import UniqueSequenceSet


@dataclass(frozen=True)
class QGramProfile:
    q: int
    counts: dict[tuple[int, ...], int]


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    values: np.ndarray  # (n, n) float64, symmetric, zero diagonal, in [0, 1]


def qgram_profile(seq: Sequence[int], q: int = 1) -> QGramProfile:
    """Count every contiguous length-q sub-sequence of seq."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if len(seq) < q:
        raise EmptySequence(
            f"sequence of length {len(seq)} has no q-grams for q={q}"
        )
    counts = Counter(tuple(seq[i : i + q]) for i in range(len(seq) - q + 1))
    return QGramProfile(q=q, counts=dict(counts))


def qgram_distance(p: QGramProfile, r: QGramProfile) -> float:
    """Cosine distance 1 - (p.r)/(|p||r|) over the union of q-gram keys.

    Equal profiles return exactly 0.0. Keys are visited in sorted order so
    the summation order (and hence the result) is deterministic.
    """
    if p.q != r.q:
        raise QMismatch(f"profiles have q={p.q} and q={r.q}")
    if not p.counts or not r.counts:
        raise EmptySequence("cannot compare empty q-gram profiles")
    if p.counts == r.counts:
        return 0.0
    dot = 0.0
    for key in sorted(p.counts.keys() & r.counts.keys()):
        dot += p.counts[key] * r.counts[key]
    norm_p = math.sqrt(sum(c * c for _, c in sorted(p.counts.items())))
    norm_r = math.sqrt(sum(c * c for _, c in sorted(r.counts.items())))
    d = 1.0 - dot / (norm_p * norm_r)
    return min(1.0, max(0.0, d))


def distance_matrix(uset: UniqueSequenceSet, q: int = 1) -> DistanceMatrix:
    """Pairwise q-gram distances over the unique sequences.

    Symmetric with a zero diagonal by construction: each pair is computed
    once and mirrored.
    """
    n = uset.N
    if n < 2:
        raise ValueError("distance matrix needs at least 2 sequences")
    profiles = [qgram_profile(u.sequence, q) for u in uset.sequences]
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        p = profiles[i]
        for j in range(i + 1, n):
            d = qgram_distance(p, profiles[j])
            values[i, j] = d
            values[j, i] = d
    return DistanceMatrix(n=n, values=values)


def average_linkage(
    cluster_a: Iterable[int], cluster_b: Iterable[int], d: DistanceMatrix
) -> float:
    """Mean of d[i][j] over i in A, j in B (the average agglomeration rule)."""
    a = sorted(cluster_a)
    b = sorted(cluster_b)
    if not a or not b:
        raise ValueError("clusters must be non-empty")
    if set(a) & set(b):
        raise OverlappingClusters(f"clusters share indices {sorted(set(a) & set(b))}")
    return float(d.values[np.ix_(a, b)].mean())
