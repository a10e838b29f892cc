from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqlens.distance import (
    average_linkage,
    distance_matrix,
    qgram_distance,
    qgram_profile,
)
from seqlens.errors import EmptySequence, OverlappingClusters, QMismatch

from .conftest import make_unique_set
from .oracles import brute_cosine_distance, brute_qgrams

A, B, C, D, E = range(5)


def test_unigram_profile_counts():
    p = qgram_profile([A, A, B], 1)
    assert p.counts == {(A,): 2, (B,): 1}


def test_bigram_profile_matches_enumeration_oracle():
    seq = [A, B, A, B]
    p = qgram_profile(seq, 2)
    assert p.counts == dict(brute_qgrams(seq, 2))
    assert p.counts == {(A, B): 2, (B, A): 1}


def test_empty_sequence_rejected():
    with pytest.raises(EmptySequence):
        qgram_profile([], 1)
    with pytest.raises(EmptySequence):
        qgram_profile([A], 2)


def test_permutation_distance_is_zero():
    # "abcde" vs "deabc"
    p = qgram_profile([A, B, C, D, E], 1)
    r = qgram_profile([D, E, A, B, C], 1)
    assert qgram_distance(p, r) == pytest.approx(0.0, abs=1e-12)


def test_disjoint_supports_distance_one():
    p = qgram_profile([A, B], 1)
    r = qgram_profile([C, D], 1)
    assert qgram_distance(p, r) == pytest.approx(1.0, abs=1e-12)


def test_aab_vs_ab_hand_value():
    # frozen from the enumeration oracle: 1 - 3/sqrt(10)
    expected = brute_cosine_distance([A, A, B], [A, B])
    assert expected == pytest.approx(1 - 3 / math.sqrt(10), abs=1e-12)
    p = qgram_profile([A, A, B], 1)
    r = qgram_profile([A, B], 1)
    assert qgram_distance(p, r) == pytest.approx(expected, abs=1e-12)
    assert qgram_distance(p, r) == pytest.approx(0.05132, abs=5e-6)


def test_q_mismatch():
    with pytest.raises(QMismatch):
        qgram_distance(qgram_profile([A], 1), qgram_profile([A, B], 2))


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(0, 4), min_size=1, max_size=10),
    st.lists(st.integers(0, 4), min_size=1, max_size=10),
)
def test_distance_symmetric_bounded_matches_oracle(xs, ys):
    p, r = qgram_profile(xs, 1), qgram_profile(ys, 1)
    d1, d2 = qgram_distance(p, r), qgram_distance(r, p)
    assert d1 == pytest.approx(d2, abs=1e-12)
    assert 0.0 <= d1 <= 1.0
    assert d1 == pytest.approx(brute_cosine_distance(xs, ys), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=8), st.randoms(use_true_random=False))
def test_unigram_distance_invariant_under_permutation(xs, pyrandom):
    shuffled = xs[:]
    pyrandom.shuffle(shuffled)
    p, r = qgram_profile(xs, 1), qgram_profile(shuffled, 1)
    assert qgram_distance(p, r) == pytest.approx(0.0, abs=1e-12)


def test_matrix_identical_profiles_and_disjoint():
    uset = make_unique_set([(A, B), (B, A)])
    d = distance_matrix(uset, 1)
    assert d.values[0, 1] == pytest.approx(0.0, abs=1e-12)
    uset = make_unique_set([(A, B), (C, D)])
    d = distance_matrix(uset, 1)
    assert d.values[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_matrix_symmetric_zero_diagonal(rng):
    seqs = [tuple(rng.randrange(4) for _ in range(rng.randint(1, 7))) for _ in range(8)]
    seqs = list(dict.fromkeys(seqs))
    d = distance_matrix(make_unique_set(seqs), 1)
    assert np.array_equal(d.values, d.values.T)
    assert np.all(np.diag(d.values) == 0.0)
    assert np.all((d.values >= 0.0) & (d.values <= 1.0))


def test_average_linkage_single_pair_and_mean():
    uset = make_unique_set([(A,), (B,), (A, B)])
    d = distance_matrix(uset, 1)
    assert average_linkage({0}, {1}, d) == pytest.approx(d.values[0, 1])
    expected = (d.values[0, 1] + d.values[0, 2]) / 2
    assert average_linkage({0}, {1, 2}, d) == pytest.approx(expected)


def test_average_linkage_matches_brute_force(rng):
    seqs = set()
    while len(seqs) < 9:
        seqs.add(tuple(rng.randrange(5) for _ in range(rng.randint(1, 6))))
    d = distance_matrix(make_unique_set(sorted(seqs)), 1)
    cluster_a = {0, 2, 4, 6, 8}
    cluster_b = {1, 3, 5, 7}
    got = average_linkage(cluster_a, cluster_b, d)
    brute = np.mean([d.values[i, j] for i in sorted(cluster_a) for j in sorted(cluster_b)])
    assert got == pytest.approx(float(brute), abs=1e-12)
    pairs = [d.values[i, j] for i in cluster_a for j in cluster_b]
    assert min(pairs) <= got <= max(pairs)


def test_average_linkage_overlap_rejected():
    uset = make_unique_set([(A,), (B,), (C,)])
    d = distance_matrix(uset, 1)
    with pytest.raises(OverlappingClusters):
        average_linkage({0, 1}, {1, 2}, d)
