from __future__ import annotations

import random
from io import StringIO

import pytest

from seqlens.ingest import (
    UniqueSequence,
    UniqueSequenceSet,
    parse_event_log,
)

EVENTS_CSV = """record_id,event_type,timestamp
r1,call,2024-03-01T09:00:00Z
r1,ambulance,2024-03-01T09:20:00Z
r1,hospital,2024-03-01T10:05:00Z
r2,call,2024-03-02T14:00:00Z
r2,ambulance,2024-03-02T14:25:00Z
r2,hospital,2024-03-02T15:10:00Z
r3,call,2024-03-03T08:00:00Z
r3,closed,2024-03-03T08:10:00Z
r4,call,2024-03-04T20:00:00Z
r4,closed,2024-03-04T20:12:00Z
r5,call,2024-03-05T11:00:00Z
r5,ambulance,2024-03-05T11:30:00Z
"""

ATTRS_CSV = """record_id,age,region,enrolled
r1,34,north,2024-01-15
r2,78,south,2024-02-01
r3,22,north,2024-01-20
r4,25,east,2024-03-05
r5,61,south,2024-02-14
"""


@pytest.fixture
def rng():
    return random.Random(20240803)


@pytest.fixture
def small_log():
    return parse_event_log(StringIO(EVENTS_CSV), StringIO(ATTRS_CSV))


def make_unique_set(sequences, freqs=None):
    """UniqueSequenceSet from raw tuples (test helper)."""
    freqs = freqs or [1] * len(sequences)
    return UniqueSequenceSet(
        sequences=tuple(
            UniqueSequence(
                sequence=tuple(seq),
                frequency=f,
                member_record_ids=tuple(f"r{i}_{j}" for j in range(f)),
            )
            for i, (seq, f) in enumerate(zip(sequences, freqs))
        )
    )


def random_sequences(rng, n, alphabet, max_len, min_len=1):
    """n distinct random tuples over range(alphabet)."""
    seen = set()
    while len(seen) < n:
        length = rng.randint(min_len, max_len)
        seen.add(tuple(rng.randrange(alphabet) for _ in range(length)))
    return sorted(seen)
