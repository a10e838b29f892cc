"""Synthetic event-sequence generators for demos, tests, and benchmarks."""

from __future__ import annotations

import io
import random
from datetime import datetime, timedelta, timezone

from .ingest import UniqueSequence, UniqueSequenceSet


def random_unique_set(
    n: int,
    alphabet_size: int,
    max_len: int,
    rng: random.Random,
    *,
    min_len: int = 1,
    max_frequency: int = 5,
) -> UniqueSequenceSet:
    """n distinct random sequences with random frequencies."""
    seen: set[tuple[int, ...]] = set()
    sequences: list[UniqueSequence] = []
    attempts = 0
    while len(sequences) < n:
        attempts += 1
        if attempts > 100 * n + 1000:
            raise ValueError(
                f"cannot draw {n} distinct sequences from this configuration"
            )
        length = rng.randint(min_len, max_len)
        seq = tuple(rng.randrange(alphabet_size) for _ in range(length))
        if seq in seen:
            continue
        seen.add(seq)
        freq = rng.randint(1, max_frequency)
        idx = len(sequences)
        sequences.append(
            UniqueSequence(
                sequence=seq,
                frequency=freq,
                member_record_ids=tuple(f"r{idx}_{i}" for i in range(freq)),
            )
        )
    return UniqueSequenceSet(sequences=tuple(sequences))


def sized_unique_set(
    n: int, avg_len: int, alphabet_size: int, rng: random.Random
) -> UniqueSequenceSet:
    """Benchmark-shaped sets: lengths clustered around avg_len."""
    spread = max(1, avg_len // 3)
    return random_unique_set(
        n,
        alphabet_size,
        max_len=avg_len + spread,
        min_len=max(1, avg_len - spread),
        rng=rng,
    )


def grouped_unique_set(
    n_groups: int,
    per_group: int,
    symbols_per_group: int,
    seq_len: int,
    rng: random.Random,
) -> UniqueSequenceSet:
    """Well-separated groups: each group draws from its own symbol pool, so
    cross-group q-gram distance is 1 while within-group distances stay near
    0 (sequences in a group are permutations of a shared multiset)."""
    sequences: list[UniqueSequence] = []
    for g in range(n_groups):
        pool = list(range(g * symbols_per_group, (g + 1) * symbols_per_group))
        base = [pool[i % len(pool)] for i in range(seq_len)]
        seen: set[tuple[int, ...]] = set()
        while len(seen) < per_group:
            seq = base[:]
            rng.shuffle(seq)
            seen.add(tuple(seq))
        for seq in sorted(seen):
            idx = len(sequences)
            sequences.append(
                UniqueSequence(
                    sequence=seq,
                    frequency=rng.randint(1, 4),
                    member_record_ids=(f"r{idx}",),
                )
            )
    # member ids must match frequencies
    fixed = []
    for idx, u in enumerate(sequences):
        fixed.append(
            UniqueSequence(
                sequence=u.sequence,
                frequency=u.frequency,
                member_record_ids=tuple(f"r{idx}_{i}" for i in range(u.frequency)),
            )
        )
    return UniqueSequenceSet(sequences=tuple(fixed))


def synthetic_event_log_csv(
    n_records: int,
    rng: random.Random,
    *,
    n_patterns: int = 6,
    alphabet_size: int = 10,
    max_len: int = 8,
    start: datetime | None = None,
) -> tuple[str, str]:
    """(events_csv, attributes_csv) for a synthetic log.

    Records are drawn from a handful of sequence patterns with occasional
    mutations, so deduplication and clustering have structure to find.
    Attributes: age (numeric), group (categorical), enrolled (date).
    """
    start = start or datetime(2024, 1, 1, tzinfo=timezone.utc)
    event_names = [f"E{i}" for i in range(alphabet_size)]
    patterns = [
        [rng.randrange(alphabet_size) for _ in range(rng.randint(2, max_len))]
        for _ in range(n_patterns)
    ]

    events = io.StringIO()
    attrs = io.StringIO()
    events.write("record_id,event_type,timestamp\n")
    attrs.write("record_id,age,group,enrolled\n")
    for i in range(n_records):
        pattern = list(rng.choice(patterns))
        if rng.random() < 0.2:  # mutate occasionally to create rare variants
            pattern[rng.randrange(len(pattern))] = rng.randrange(alphabet_size)
        t = start + timedelta(days=rng.randint(0, 120), minutes=rng.randint(0, 600))
        rid = f"rec{i:05d}"
        for event in pattern:
            events.write(f"{rid},{event_names[event]},{t.isoformat()}\n")
            t += timedelta(minutes=rng.randint(1, 90))
        age = rng.randint(5, 95)
        group = rng.choice(["north", "south", "east", "west"])
        enrolled = (start + timedelta(days=rng.randint(0, 365))).date().isoformat()
        attrs.write(f"{rid},{age},{group},{enrolled}\n")
    return events.getvalue(), attrs.getvalue()
