"""
Build an aggregate tree and read the overview
=============================================

Ingest a synthetic event log, deduplicate it into unique sequences, build
the merge tree, and print the cluster overview at a recommended number of
clusters as ASCII art.
"""

import random
from io import StringIO

from seqlens import (
    build_aggregate_tree,
    cut_at_k,
    deduplicate,
    distance_matrix,
    parse_event_log,
    recommend_k,
)
from seqlens.synth import synthetic_event_log_csv

rng = random.Random(11)
events_csv, attrs_csv = synthetic_event_log_csv(400, rng, n_patterns=5, alphabet_size=9)

# parse + deduplicate
log = parse_event_log(StringIO(events_csv), StringIO(attrs_csv))
uset = deduplicate(log)
print(f"{log.total_records} records -> {uset.N} unique sequences, "
      f"{len(log.alphabet)} event types")

# build the tree (leaves = unique sequences, each node carries an alignment)
dmat = distance_matrix(uset, q=1)
tree = build_aggregate_tree(uset, gap=log.alphabet.gap_id, precomputed=dmat)
print(f"tree: {len(tree.nodes)} nodes, alignment time "
      f"{tree.stats.align_seconds:.2f}s")

# ask the silhouette curve for a good number of clusters
recommended = recommend_k(tree, dmat)
k = recommended[0]
print(f"recommended k values: {recommended} -> using k={k}\n")

# render each cluster of the k-cut: one line per alignment row
frontier = cut_at_k(tree, k)
for node_id in frontier.node_ids:
    view = tree.cluster_view(node_id, threshold=0.5)
    share = f"{view.record_share * 100:.1f}%"
    flag = " (small)" if view.small_cluster else ""
    print(f"cluster {node_id}: {view.record_count} records, {share}{flag}")
    for row_cells, freq in list(zip(view.cells, view.row_freqs))[:4]:
        rendered = []
        for cell in row_cells:
            if not cell:
                rendered.append("  .  ")
            elif len(cell) == 1:
                rendered.append(f"{log.alphabet.name_of(cell[0]):^5}")
            else:
                rendered.append("[" + "+".join(log.alphabet.name_of(c) for c in cell) + "]")
        print(f"  x{freq:<3} " + " ".join(rendered))
    if view.record_count > 4:
        print("  ...")
    print()
