from __future__ import annotations

import math
import random

import numpy as np
import pytest

from seqlens.aggtree import build_aggregate_tree, cut_at_k
from seqlens.distance import distance_matrix
from seqlens.errors import DegeneratePartition, KOutOfRange
from seqlens.quality import (
    _ranked_maxima,
    average_silhouette_width,
    partition_members,
    recommend_k,
    silhouette_curve,
    silhouette_value,
)
from seqlens.synth import grouped_unique_set

from .conftest import make_unique_set, random_sequences
from .oracles import direct_silhouette

GAP = 99
A, B, C, D = 0, 1, 2, 3

# the toy set from the distance module: {"aab", "ab", "cd", "ccd"}
TOY = [(A, A, B), (A, B), (C, D), (C, C, D)]


def toy_setup():
    uset = make_unique_set(TOY)
    d = distance_matrix(uset, 1)
    tree = build_aggregate_tree(uset, gap=GAP)
    return uset, d, tree


def test_singleton_cluster_scores_zero():
    uset, d, _ = toy_setup()
    clusters = [(0,), (1, 2, 3)]
    assert silhouette_value(0, clusters, d) == 0.0


def test_toy_hand_computed_value():
    # u(s0) = d(aab, ab) = 1 - 3/sqrt(10), v(s0) = 1 -> z = 3/sqrt(10)
    uset, d, tree = toy_setup()
    clusters = [(0, 1), (2, 3)]
    expected = 3 / math.sqrt(10)
    assert silhouette_value(0, clusters, d) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.94868, abs=5e-6)
    assert average_silhouette_width(tree, d, 2) == pytest.approx(expected, abs=1e-9)


def test_equal_distances_give_zero():
    uset = make_unique_set([(A,), (B,), (C,), (D,)])
    d = distance_matrix(uset, 1)  # all off-diagonal distances are 1
    clusters = [(0, 1), (2, 3)]
    for s in range(4):
        assert silhouette_value(s, clusters, d) == pytest.approx(0.0, abs=1e-12)


def test_degenerate_partition_rejected():
    uset, d, tree = toy_setup()
    with pytest.raises(DegeneratePartition):
        silhouette_value(0, [(0, 1, 2, 3)], d)
    with pytest.raises(KOutOfRange):
        average_silhouette_width(tree, d, 1)
    with pytest.raises(KOutOfRange):
        average_silhouette_width(tree, d, 4)


def test_bounds_and_sweep_matches_naive(rng):
    for _ in range(20):
        n = rng.randint(4, 12)
        seqs = random_sequences(rng, n, alphabet=4, max_len=6)
        uset = make_unique_set(seqs, freqs=[rng.randint(1, 3) for _ in range(n)])
        d = distance_matrix(uset, 1)
        tree = build_aggregate_tree(uset, gap=GAP)
        curve = silhouette_curve(tree, d)
        assert set(curve.values) == set(range(2, n))
        for k, z in curve.values.items():
            assert -1.0 <= z <= 1.0
            assert z == pytest.approx(
                average_silhouette_width(tree, d, k), abs=1e-12
            )


def test_matches_independent_oracle(rng):
    for _ in range(10):
        n = rng.randint(4, 12)
        seqs = random_sequences(rng, n, alphabet=5, max_len=7)
        uset = make_unique_set(seqs)
        d = distance_matrix(uset, 1)
        tree = build_aggregate_tree(uset, gap=GAP)
        for k in range(2, n):
            members = partition_members(tree, cut_at_k(tree, k))
            labels = [0] * n
            for cluster_idx, cluster in enumerate(members):
                for s in cluster:
                    labels[s] = cluster_idx
            expected = direct_silhouette(labels, d.values.tolist())
            assert average_silhouette_width(tree, d, k) == pytest.approx(
                expected, abs=1e-9
            )


def test_ranked_maxima_conventions():
    assert _ranked_maxima({2: 0.5, 3: 0.9, 4: 0.7, 5: 0.8, 6: 0.6}, 10) == (3, 5)
    # strictly decreasing curve: only the boundary k=2
    assert _ranked_maxima({2: 0.9, 3: 0.7, 4: 0.5, 5: 0.2}, 10) == (2,)
    # ties rank the smaller k first
    assert _ranked_maxima({2: 0.3, 3: 0.8, 4: 0.1, 5: 0.8, 6: 0.0}, 10) == (3, 5)
    # truncation
    assert len(_ranked_maxima({k: float(k % 2) for k in range(2, 40)}, 10)) == 10


def test_first_recommendation_attains_global_max(rng):
    seqs = random_sequences(rng, 10, alphabet=4, max_len=6)
    uset = make_unique_set(seqs)
    d = distance_matrix(uset, 1)
    tree = build_aggregate_tree(uset, gap=GAP)
    curve = silhouette_curve(tree, d)
    first = curve.recommendations[0]
    assert curve.values[first] == max(curve.values.values())
    # ranked strictly by value after the tie-break
    zs = [curve.values[k] for k in curve.recommendations]
    assert zs == sorted(zs, reverse=True)


def test_three_group_fixture_recommends_three():
    rng = random.Random(7)
    uset = grouped_unique_set(
        n_groups=3, per_group=5, symbols_per_group=4, seq_len=6, rng=rng
    )
    d = distance_matrix(uset, 1)
    tree = build_aggregate_tree(uset, gap=999)
    recs = recommend_k(tree, d)
    assert recs[0] == 3
    curve = silhouette_curve(tree, d)
    assert curve.values[3] > 0.9


def test_recommend_requires_four_sequences():
    uset = make_unique_set([(A,), (B,), (C,)])
    d = distance_matrix(uset, 1)
    tree = build_aggregate_tree(uset, gap=GAP)
    with pytest.raises(DegeneratePartition):
        recommend_k(tree, d)


def test_frequency_weighted_option(rng):
    seqs = random_sequences(rng, 6, alphabet=3, max_len=5)
    uset = make_unique_set(seqs, freqs=[5, 1, 1, 1, 1, 1])
    d = distance_matrix(uset, 1)
    tree = build_aggregate_tree(uset, gap=GAP)
    k = 3
    weighted = average_silhouette_width(tree, d, k, frequency_weighted=True)
    members = partition_members(tree, cut_at_k(tree, k))
    zs = np.zeros(6)
    for cluster in members:
        for s in cluster:
            zs[s] = silhouette_value(s, members, d)
    freqs = np.asarray(uset.frequencies(), dtype=float)
    assert weighted == pytest.approx(float(np.dot(zs, freqs) / freqs.sum()), abs=1e-12)
    curve = silhouette_curve(tree, d, frequency_weighted=True)
    assert curve.values[k] == pytest.approx(weighted, abs=1e-12)


def test_csv_export():
    uset, d, tree = toy_setup()
    curve = silhouette_curve(tree, d)
    csv_text = curve.to_csv()
    lines = csv_text.strip().splitlines()
    assert lines[0] == "k,avg_silhouette_width"
    assert len(lines) == 1 + len(curve.values)
    k, z = lines[1].split(",")
    assert int(k) in curve.values
    assert float(z) == curve.values[int(k)]
