"""Clustering quality over the cut spectrum: average silhouette width.

For an element s in a partition, u(s) is its mean distance to co-cluster
members, v(s) the smallest mean distance to any other cluster, and the
silhouette value is (v - u) / max(u, v); elements in singleton clusters get
0. The average over all unique sequences, swept over k, yields a curve whose
global and local maxima are offered as recommended cluster counts.

The full curve is computed in a single leaves-to-root sweep that reuses
per-cluster distance sums; it matches a direct per-k evaluation exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aggtree import AggregateTree, Frontier, cut_at_k
from .distance import DistanceMatrix
from .errors import DegeneratePartition, KOutOfRange


@dataclass(frozen=True)
class SilhouetteCurve:
    values: dict[int, float]  # k -> average silhouette width, k in [2, N-1]
    recommendations: tuple[int, ...]  # ranked k values, best first

    def to_csv(self) -> str:
        lines = ["k,avg_silhouette_width"]
        for k in sorted(self.values):
            lines.append(f"{k},{self.values[k]!r}")
        return "\n".join(lines) + "\n"


def partition_members(
    tree: AggregateTree, frontier: Frontier
) -> list[tuple[int, ...]]:
    return [tree.node(node_id).members for node_id in frontier.node_ids]


def silhouette_value(
    s: int, clusters: Sequence[Sequence[int]], d: DistanceMatrix
) -> float:
    """Silhouette of one element given explicit cluster member lists."""
    if len(clusters) < 2:
        raise DegeneratePartition("silhouette needs at least 2 clusters")
    own = next(c for c in clusters if s in set(c))
    if len(own) == 1:
        return 0.0
    values = d.values
    u = sum(values[s, m] for m in own if m != s) / (len(own) - 1)
    v = min(
        sum(values[s, m] for m in c) / len(c)
        for c in clusters
        if c is not own
    )
    denom = max(u, v)
    if denom == 0.0:
        return 0.0
    return (v - u) / denom


def average_silhouette_width(
    tree: AggregateTree,
    d: DistanceMatrix,
    k: int,
    *,
    frequency_weighted: bool = False,
) -> float:
    """Mean silhouette over all unique sequences at the k-cluster cut.

    Direct per-element evaluation; the curve sweep must agree with it.
    """
    n = tree.N
    if k < 2 or k > n - 1:
        raise KOutOfRange(f"silhouette undefined for k={k} (valid: 2..{n - 1})")
    clusters = partition_members(tree, cut_at_k(tree, k))
    zs = [silhouette_value(s, clusters, d) for s in range(n)]
    if frequency_weighted:
        w = np.asarray(tree.frequencies, dtype=np.float64)
        return float(np.dot(zs, w) / w.sum())
    return float(np.mean(zs))


def silhouette_curve(
    tree: AggregateTree,
    d: DistanceMatrix,
    *,
    k_max: int | None = None,
    max_recommendations: int = 10,
    frequency_weighted: bool = False,
) -> SilhouetteCurve:
    """z(k) for every k in [2, min(k_max, N-1)] in one bottom-up sweep."""
    n = tree.N
    if n < 3:
        # silhouette is undefined at k=1 and k=N, so N=2 has an empty domain
        return SilhouetteCurve(values={}, recommendations=())

    values_matrix = d.values
    total = 2 * n - 1
    sums = np.zeros((n, total), dtype=np.float64)
    sums[:, :n] = values_matrix
    sizes = np.zeros(total, dtype=np.int64)
    sizes[:n] = 1
    labels = np.arange(n)
    active = list(range(n))
    weights = (
        np.asarray(tree.frequencies, dtype=np.float64) if frequency_weighted else None
    )

    curve: dict[int, float] = {}
    for step, (left, right, new, _) in enumerate(tree.merge_log):
        sums[:, new] = sums[:, left] + sums[:, right]
        sizes[new] = sizes[left] + sizes[right]
        labels[labels == left] = new
        labels[labels == right] = new
        active.remove(left)
        active.remove(right)
        active.append(new)
        k = n - step - 1
        if k < 2 or k > n - 1 or (k_max is not None and k > k_max):
            continue

        act = np.asarray(active)
        position = {node_id: idx for idx, node_id in enumerate(active)}
        own_idx = np.fromiter((position[l] for l in labels), dtype=np.int64, count=n)
        sub = sums[:, act]
        own_size = sizes[act][own_idx]
        own_sum = sub[np.arange(n), own_idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(own_size > 1, own_sum / np.maximum(own_size - 1, 1), 0.0)
            means = sub / sizes[act][None, :].astype(np.float64)
            means[np.arange(n), own_idx] = np.inf
            v = means.min(axis=1)
            denom = np.maximum(u, v)
            z = np.where(
                (own_size > 1) & (denom > 0.0), (v - u) / np.where(denom > 0, denom, 1), 0.0
            )
        if weights is not None:
            curve[k] = float(np.dot(z, weights) / weights.sum())
        else:
            curve[k] = float(z.mean())

    recs = _ranked_maxima(curve, max_recommendations)
    return SilhouetteCurve(values=curve, recommendations=recs)


def _ranked_maxima(curve: dict[int, float], max_recommendations: int) -> tuple[int, ...]:
    """Global plus local maxima, ranked by value descending (ties: smaller k).

    A boundary k is a local maximum against its single neighbor: the left
    boundary needs z(k) >= z(k+1), the right boundary z(k) > z(k-1); interior
    k need z(k) > z(k-1) and z(k) >= z(k+1).
    """
    if not curve:
        return ()
    ks = sorted(curve)
    candidates: set[int] = set()
    for idx, k in enumerate(ks):
        z = curve[k]
        rising = idx == 0 or z > curve[ks[idx - 1]]
        falling = idx == len(ks) - 1 or z >= curve[ks[idx + 1]]
        if rising and falling:
            candidates.add(k)
    best = max(curve.values())
    candidates.add(min(k for k in ks if curve[k] == best))
    ranked = sorted(candidates, key=lambda k: (-curve[k], k))
    return tuple(ranked[:max_recommendations])


def recommend_k(
    tree: AggregateTree,
    d: DistanceMatrix,
    *,
    k_max: int | None = None,
    max_recommendations: int = 10,
) -> list[int]:
    """Ranked list of suggested cluster counts (global + local maxima)."""
    if tree.N < 4:
        raise DegeneratePartition(
            f"recommendations need at least 4 unique sequences, got {tree.N}"
        )
    curve = silhouette_curve(
        tree, d, k_max=k_max, max_recommendations=max_recommendations
    )
    return list(curve.recommendations)
