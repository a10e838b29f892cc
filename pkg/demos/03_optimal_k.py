"""
Picking the number of clusters
==============================

The average silhouette width measures how well separated a k-clustering is.
Sweeping k over the whole tree gives a curve; its global and local maxima
are offered as recommended values. With three well-separated groups the
curve peaks sharply at k=3.
"""

import random
from pathlib import Path

from seqlens import build_aggregate_tree, distance_matrix, silhouette_curve
from seqlens.synth import grouped_unique_set

rng = random.Random(5)
uset = grouped_unique_set(n_groups=3, per_group=10, symbols_per_group=4, seq_len=6, rng=rng)
dmat = distance_matrix(uset, q=1)
tree = build_aggregate_tree(uset, gap=1000, precomputed=dmat)

curve = silhouette_curve(tree, dmat)
print("recommended k (ranked):", list(curve.recommendations))

# a bar chart in text: one row per k
print("\n k   avg silhouette width")
for k in sorted(curve.values):
    z = curve.values[k]
    bar = "#" * max(0, int(z * 40))
    marker = " <- recommended" if k in curve.recommendations[:3] else ""
    print(f"{k:>3}  {z:+.3f} {bar}{marker}")

# the curve exports as CSV for plotting elsewhere
out = Path(__file__).with_suffix(".csv")
out.write_text(curve.to_csv())
print(f"\ncurve written to {out.name}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ks = sorted(curve.values)
    plt.figure(figsize=(6, 3))
    plt.plot(ks, [curve.values[k] for k in ks], marker="o")
    plt.axvline(curve.recommendations[0], color="red", linestyle="--", alpha=0.5)
    plt.xlabel("number of clusters k")
    plt.ylabel("avg silhouette width")
    plt.tight_layout()
    png = Path(__file__).with_suffix(".png")
    plt.savefig(png, dpi=120)
    print(f"plot written to {png.name}")
except ImportError:
    pass
