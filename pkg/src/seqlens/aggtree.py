"""Bottom-up aggregation of unique sequences into a binary merge tree.

Every unique sequence starts as a leaf; the closest pair of clusters under
the live average-linkage distance matrix is merged until a single root
remains. Each merge aligns the two children's alignment matrices and scores
the result, so every node carries the full alignment of its member
sequences. Ties in the argmin are broken toward the lexicographically
smallest (id, id) pair, which makes builds reproducible.

The build is the precomputed phase; simplified matrices are derived on the
fly per threshold and only kept in a bounded memo.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import (
    AlignmentMatrix,
    AlignParams,
    pairwise_align,
    single_sequence_alignment,
)
from .distance import DistanceMatrix, distance_matrix
from .errors import (
    KOutOfRange,
    LeafNotSplittable,
    NodeNotInFrontier,
    SingleSequence,
    UnknownNode,
)
from .ingest import UniqueSequenceSet
from .representation import (
    ClusterView,
    InfoScoreVector,
    SimplifiedMatrix,
    build_cluster_view,
    information_scores,
    simplify,
)

TREE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TreeNode:
    id: int
    left: int | None
    right: int | None
    alignment: AlignmentMatrix
    info: InfoScoreVector
    members: tuple[int, ...]  # unique-sequence indices, in alignment row order
    record_count: int
    merge_distance: float | None  # None for leaves
    merge_order: int | None  # 1..N-1 for internal nodes

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class Frontier:
    """Node ids whose member sets partition the unique sequences.

    Ids are kept in dendrogram (left-to-right) order.
    """

    node_ids: tuple[int, ...]

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.node_ids

    def __len__(self) -> int:
        return len(self.node_ids)


@dataclass
class BuildStats:
    distance_seconds: float = 0.0
    align_seconds: float = 0.0
    score_seconds: float = 0.0
    total_seconds: float = 0.0


@dataclass
class AggregateTree:
    nodes: list[TreeNode]
    root_id: int
    merge_log: list[tuple[int, int, int, float]]  # (left, right, new, distance)
    sequences: tuple[tuple[int, ...], ...]
    frequencies: tuple[int, ...]
    gap: int
    q: int
    params: AlignParams
    degenerate: bool = False
    stats: BuildStats = field(default_factory=BuildStats)
    simplify_memo_size: int = 256
    _memo: OrderedDict = field(default_factory=OrderedDict, repr=False)
    _memo_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def N(self) -> int:
        return len(self.sequences)

    @property
    def total_records(self) -> int:
        return int(sum(self.frequencies))

    def node(self, node_id: int) -> TreeNode:
        if node_id < 0 or node_id >= len(self.nodes):
            raise UnknownNode(f"node {node_id} not in tree")
        return self.nodes[node_id]

    def simplified(self, node_id: int, threshold: float) -> SimplifiedMatrix:
        """Simplified matrix for a node at a threshold, via the bounded memo."""
        node = self.node(node_id)
        key = (node_id, threshold)
        with self._memo_lock:
            if key in self._memo:
                self._memo.move_to_end(key)
                return self._memo[key]
        result = simplify(node.alignment, node.info, threshold)
        with self._memo_lock:
            self._memo[key] = result
            self._memo.move_to_end(key)
            while len(self._memo) > self.simplify_memo_size:
                self._memo.popitem(last=False)
        return result

    def cluster_view(
        self, node_id: int, threshold: float, small_cluster_threshold: float = 0.01
    ) -> ClusterView:
        node = self.node(node_id)
        return build_cluster_view(
            node_id=node_id,
            matrix=node.alignment,
            simplified=self.simplified(node_id, threshold),
            record_count=node.record_count,
            total_records=self.total_records,
            small_cluster_threshold=small_cluster_threshold,
        )

    def dendrogram_leaf_order(self) -> list[int]:
        """Unique-sequence indices in left-to-right dendrogram order."""
        order: list[int] = []
        stack = [self.root_id]
        while stack:
            node = self.nodes[stack.pop()]
            if node.is_leaf:
                order.append(node.members[0])
            else:
                stack.append(node.right)  # type: ignore[arg-type]
                stack.append(node.left)  # type: ignore[arg-type]
        return order


def aggregate(
    n_a: TreeNode,
    n_b: TreeNode,
    params: AlignParams,
    *,
    node_id: int,
    merge_distance: float | None = None,
    merge_order: int | None = None,
    stats: BuildStats | None = None,
) -> TreeNode:
    """Merge two nodes: align their alignments and score the result."""
    if set(n_a.members) & set(n_b.members):
        raise ValueError("cannot aggregate overlapping nodes")
    t0 = time.perf_counter()
    lam = pairwise_align(n_a.alignment, n_b.alignment, params)
    t1 = time.perf_counter()
    info = information_scores(lam)
    t2 = time.perf_counter()
    if stats is not None:
        stats.align_seconds += t1 - t0
        stats.score_seconds += t2 - t1
    return TreeNode(
        id=node_id,
        left=n_a.id,
        right=n_b.id,
        alignment=lam,
        info=info,
        members=n_a.members + n_b.members,
        record_count=n_a.record_count + n_b.record_count,
        merge_distance=merge_distance,
        merge_order=merge_order,
    )


def _leaf_nodes(uset: UniqueSequenceSet, gap: int) -> list[TreeNode]:
    leaves = []
    for i, u in enumerate(uset.sequences):
        lam = single_sequence_alignment(u.sequence, i, u.frequency, gap)
        leaves.append(
            TreeNode(
                id=i,
                left=None,
                right=None,
                alignment=lam,
                info=information_scores(lam),
                members=(i,),
                record_count=u.frequency,
                merge_distance=None,
                merge_order=None,
            )
        )
    return leaves


def build_aggregate_tree(
    uset: UniqueSequenceSet,
    gap: int,
    q: int = 1,
    params: AlignParams | None = None,
    *,
    allow_single: bool = False,
    simplify_memo_size: int = 256,
    precomputed: DistanceMatrix | None = None,
) -> AggregateTree:
    """Build the full merge tree over a deduplicated sequence set.

    The live cluster-distance matrix starts as the pairwise sequence
    distances and is updated after each merge with the exact average-linkage
    recurrence d(A+B, C) = (|A| d(A,C) + |B| d(B,C)) / (|A| + |B|).
    """
    params = params or AlignParams()
    n = uset.N
    stats = BuildStats()
    sequences = tuple(u.sequence for u in uset.sequences)
    frequencies = tuple(u.frequency for u in uset.sequences)

    if n == 1:
        if not allow_single:
            raise SingleSequence("tree over one unique sequence is a lone leaf")
        leaf = _leaf_nodes(uset, gap)[0]
        return AggregateTree(
            nodes=[leaf],
            root_id=0,
            merge_log=[],
            sequences=sequences,
            frequencies=frequencies,
            gap=gap,
            q=q,
            params=params,
            degenerate=True,
            stats=stats,
            simplify_memo_size=simplify_memo_size,
        )

    t_start = time.perf_counter()
    t0 = time.perf_counter()
    dmat = precomputed if precomputed is not None else distance_matrix(uset, q)
    stats.distance_seconds = time.perf_counter() - t0

    total = 2 * n - 1
    live = np.full((total, total), np.inf, dtype=np.float64)
    live[:n, :n] = dmat.values

    nodes = _leaf_nodes(uset, gap)
    active = list(range(n))  # ascending node ids = creation order
    merge_log: list[tuple[int, int, int, float]] = []

    for step in range(n - 1):
        act = np.asarray(active)
        sub = live[np.ix_(act, act)]
        iu_r, iu_c = np.triu_indices(len(active), k=1)
        flat = sub[iu_r, iu_c]
        best = int(np.argmin(flat))  # first minimum in (i, j) lexicographic order
        i, j = int(iu_r[best]), int(iu_c[best])
        a_id, b_id = active[i], active[j]
        dist = float(live[a_id, b_id])

        new_id = n + step
        node = aggregate(
            nodes[a_id],
            nodes[b_id],
            params,
            node_id=new_id,
            merge_distance=dist,
            merge_order=step + 1,
            stats=stats,
        )
        nodes.append(node)
        merge_log.append((a_id, b_id, new_id, dist))

        others = [x for x in active if x != a_id and x != b_id]
        if others:
            idx = np.asarray(others)
            na = len(nodes[a_id].members)
            nb = len(nodes[b_id].members)
            merged = (na * live[a_id, idx] + nb * live[b_id, idx]) / (na + nb)
            live[new_id, idx] = merged
            live[idx, new_id] = merged
        active = others + [new_id]

    stats.total_seconds = time.perf_counter() - t_start
    return AggregateTree(
        nodes=nodes,
        root_id=total - 1,
        merge_log=merge_log,
        sequences=sequences,
        frequencies=frequencies,
        gap=gap,
        q=q,
        params=params,
        stats=stats,
        simplify_memo_size=simplify_memo_size,
    )


def cut_at_k(tree: AggregateTree, k: int) -> Frontier:
    """Frontier after replaying the first N-k merges from the leaves."""
    n = tree.N
    if k < 1 or k > n:
        raise KOutOfRange(f"k={k} outside [1, {n}]")
    frontier: set[int] = set(range(n))
    for left, right, new, _ in tree.merge_log[: n - k]:
        frontier.discard(left)
        frontier.discard(right)
        frontier.add(new)
    return Frontier(node_ids=tuple(_dendrogram_order(tree, frontier)))


def _dendrogram_order(tree: AggregateTree, frontier: set[int]) -> list[int]:
    order: list[int] = []
    stack = [tree.root_id]
    while stack:
        node_id = stack.pop()
        if node_id in frontier:
            order.append(node_id)
            continue
        node = tree.nodes[node_id]
        if node.is_leaf:
            continue
        stack.append(node.right)  # type: ignore[arg-type]
        stack.append(node.left)  # type: ignore[arg-type]
    return order


def split_node(tree: AggregateTree, frontier: Frontier, node_id: int) -> Frontier:
    """Replace a frontier node by its two children, preserving order."""
    if node_id not in frontier:
        raise NodeNotInFrontier(f"node {node_id} not in frontier")
    node = tree.node(node_id)
    if node.is_leaf:
        raise LeafNotSplittable(f"node {node_id} is a leaf")
    ids = list(frontier.node_ids)
    pos = ids.index(node_id)
    ids[pos : pos + 1] = [node.left, node.right]
    return Frontier(node_ids=tuple(ids))


def merge_frontier_nodes(
    tree: AggregateTree, frontier: Frontier, node_id: int
) -> Frontier:
    """Inverse of split: replace a node's two children by the node itself."""
    node = tree.node(node_id)
    if node.is_leaf:
        raise LeafNotSplittable(f"node {node_id} has no children to collapse")
    ids = list(frontier.node_ids)
    if node.left not in ids or node.right not in ids:
        raise NodeNotInFrontier("children are not both in the frontier")
    ids[ids.index(node.left)] = node_id
    ids.remove(node.right)
    return Frontier(node_ids=tuple(ids))


# --- persistence ------------------------------------------------------------


def content_hash(
    dataset_fingerprint: str, filters_sig: str, q: int, params: AlignParams
) -> str:
    payload = json.dumps(
        {
            "dataset": dataset_fingerprint,
            "filters": filters_sig,
            "q": q,
            "gap_open_penalty": params.gap_open_penalty,
            "match_score": params.match_score,
            "mismatch_score": params.mismatch_score,
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def tree_to_dict(tree: AggregateTree, alphabet_names: list[str], key: str) -> dict:
    return {
        "format_version": TREE_FORMAT_VERSION,
        "key": key,
        "alphabet": list(alphabet_names),
        "gap": tree.gap,
        "q": tree.q,
        "params": {
            "gap_open_penalty": tree.params.gap_open_penalty,
            "match_score": tree.params.match_score,
            "mismatch_score": tree.params.mismatch_score,
        },
        "sequences": [list(s) for s in tree.sequences],
        "frequencies": list(tree.frequencies),
        "degenerate": tree.degenerate,
        "merge_log": [[l, r, new, dist] for l, r, new, dist in tree.merge_log],
        "nodes": [
            {
                "id": node.id,
                "left": node.left,
                "right": node.right,
                "row_sequence_ids": list(node.alignment.row_sequence_ids),
                "rows": node.alignment.rows.tolist(),
            }
            for node in tree.nodes
        ],
    }


def tree_from_dict(data: dict) -> tuple[AggregateTree, list[str], str]:
    if data.get("format_version") != TREE_FORMAT_VERSION:
        raise ValueError(f"unsupported tree cache version {data.get('format_version')}")
    params = AlignParams(**data["params"])
    sequences = tuple(tuple(s) for s in data["sequences"])
    frequencies = tuple(data["frequencies"])
    gap = data["gap"]
    freq_of = dict(zip(range(len(sequences)), frequencies))

    merge_log = [tuple(entry) for entry in data["merge_log"]]
    distances = {new: dist for _, _, new, dist in merge_log}
    orders = {new: i + 1 for i, (_, _, new, _) in enumerate(merge_log)}

    nodes: list[TreeNode] = []
    for raw in data["nodes"]:
        row_ids = tuple(raw["row_sequence_ids"])
        rows = np.asarray(raw["rows"], dtype=np.int32).reshape(len(row_ids), -1)
        lam = AlignmentMatrix(
            rows=rows,
            row_sequence_ids=row_ids,
            row_freqs=tuple(freq_of[i] for i in row_ids),
            gap=gap,
        )
        nodes.append(
            TreeNode(
                id=raw["id"],
                left=raw["left"],
                right=raw["right"],
                alignment=lam,
                info=information_scores(lam),
                members=row_ids,
                record_count=sum(freq_of[i] for i in row_ids),
                merge_distance=distances.get(raw["id"]),
                merge_order=orders.get(raw["id"]),
            )
        )
    tree = AggregateTree(
        nodes=nodes,
        root_id=len(nodes) - 1,
        merge_log=[(l, r, new, d) for l, r, new, d in merge_log],
        sequences=sequences,
        frequencies=frequencies,
        gap=gap,
        q=data["q"],
        params=params,
        degenerate=data.get("degenerate", False),
    )
    return tree, list(data["alphabet"]), data["key"]


def save_tree_cache(
    path: str | Path, tree: AggregateTree, alphabet_names: list[str], key: str
) -> None:
    Path(path).write_text(
        json.dumps(tree_to_dict(tree, alphabet_names, key)), encoding="utf-8"
    )


def load_tree_cache(path: str | Path) -> tuple[AggregateTree, list[str], str]:
    return tree_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
