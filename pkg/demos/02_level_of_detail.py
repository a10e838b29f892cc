"""
Two directions of zoom
======================

The overview transforms along two axes: the number of clusters k (vertical,
cut the tree higher or lower) and the information threshold (horizontal,
merge runs of mixed columns). This script sweeps both and shows how the
shape of the summary changes.
"""

import random

from seqlens import build_aggregate_tree, cut_at_k, distance_matrix
from seqlens.synth import grouped_unique_set

rng = random.Random(23)
uset = grouped_unique_set(n_groups=4, per_group=8, symbols_per_group=5, seq_len=7, rng=rng)
dmat = distance_matrix(uset, q=1)
tree = build_aggregate_tree(uset, gap=1000, precomputed=dmat)

print(f"N = {uset.N} unique sequences\n")

# vertical: fewer clusters = coarser, more = finer
print("k sweep (threshold fixed at 0.6): columns per cluster")
for k in (1, 2, 4, 8, 16, uset.N):
    frontier = cut_at_k(tree, k)
    widths = [tree.cluster_view(i, 0.6).column_origin for i in frontier.node_ids]
    summary = ", ".join(str(len(w)) for w in widths[:8])
    more = " ..." if len(widths) > 8 else ""
    print(f"  k={k:>3}: [{summary}{more}]")

# horizontal: raising the threshold merges more columns away
print("\nthreshold sweep at k=4: alignment length M vs simplified length M'")
frontier = cut_at_k(tree, 4)
for step in range(0, 11, 2):
    threshold = step / 10
    parts = []
    for node_id in frontier.node_ids:
        node = tree.node(node_id)
        view = tree.cluster_view(node_id, threshold)
        merged = sum(view.merged_columns)
        parts.append(f"{node.alignment.M}->{len(view.column_origin)}({merged} merged)")
    print(f"  threshold {threshold:.1f}: " + "  ".join(parts))

print("\nat threshold 0 nothing merges; at 1 every run of imperfect columns collapses")
