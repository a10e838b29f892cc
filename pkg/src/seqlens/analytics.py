"""Filters, selections, attribute aggregation, and sequence retrieval.

Filters are conjunctive and order-independent; a filter that changes the
record set triggers a full pipeline rebuild downstream, keyed by the
canonical signature computed here. Temporal filter kinds (date_range,
day_of_week, month, year) evaluate the record's first event timestamp, i.e.
when its pathway started.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import TypeMismatch, UnknownAttribute, UnknownId
from .ingest import EventLog, IndividualRecord, UniqueSequenceSet, parse_timestamp

FILTER_KINDS = (
    "attribute",
    "frequency",
    "date_range",
    "event_occurrence",
    "day_of_week",
    "month",
    "year",
)
OPERATORS = ("=", "!=", "<", "<=", ">", ">=", "in", "contains")

_MISSING_BIN = "(missing)"


@dataclass(frozen=True)
class Filter:
    kind: str
    op: str
    value: object
    attribute: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in FILTER_KINDS:
            raise TypeMismatch(f"unknown filter kind {self.kind!r}")
        if self.op not in OPERATORS:
            raise TypeMismatch(f"unknown operator {self.op!r}")
        if self.kind == "attribute" and not self.attribute:
            raise TypeMismatch("attribute filters need an attribute name")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "op": self.op, "value": self.value}
        if self.attribute is not None:
            out["attribute"] = self.attribute
        return out

    @staticmethod
    def from_dict(raw: Mapping) -> "Filter":
        return Filter(
            kind=raw["kind"],
            op=raw["op"],
            value=raw["value"],
            attribute=raw.get("attribute"),
        )


@dataclass(frozen=True)
class Selection:
    scope: str  # clusters | unique_sequences | cells
    ids: tuple
    resolved_record_ids: tuple[str, ...]


@dataclass(frozen=True)
class StackedBarData:
    attribute: str
    chart_type: str  # selected_data | sequence | cluster
    bins: tuple[str, ...]
    series: tuple[tuple[str, tuple[int, ...]], ...]


def filter_signature(filters: Sequence[Filter]) -> str:
    """Canonical signature: sorted filter list, hashed. Empty list -> ''."""
    if not filters:
        return ""
    canonical = sorted(
        json.dumps(f.to_dict(), sort_keys=True, separators=(",", ":"))
        for f in filters
    )
    return hashlib.sha256("|".join(canonical).encode("utf-8")).hexdigest()[:16]


def _compare(actual, op: str, expected) -> bool:
    if op == "=":
        return actual == expected
    if op == "!=":
        return actual != expected
    if op == "in":
        if not isinstance(expected, (list, tuple)):
            raise TypeMismatch("'in' filters need a list value")
        return actual in expected
    if op == "contains":
        return isinstance(actual, str) and str(expected) in actual
    if actual is None:
        return False
    try:
        if op == "<":
            return actual < expected
        if op == "<=":
            return actual <= expected
        if op == ">":
            return actual > expected
        if op == ">=":
            return actual >= expected
    except TypeError as exc:
        raise TypeMismatch(f"cannot compare {actual!r} {op} {expected!r}") from exc
    raise TypeMismatch(f"unknown operator {op!r}")


def _first_event_dt(record: IndividualRecord) -> datetime:
    return datetime.fromtimestamp(record.events[0][1] / 1000.0, tz=timezone.utc)


def _record_matches(
    record: IndividualRecord,
    flt: Filter,
    log: EventLog,
    freq_by_record: Mapping[str, int],
) -> bool:
    if flt.kind == "attribute":
        if flt.attribute not in log.attribute_schema:
            raise UnknownAttribute(f"unknown attribute {flt.attribute!r}")
        actual = record.attributes.get(flt.attribute)
        expected = flt.value
        if log.attribute_schema[flt.attribute] == "numeric" and expected is not None:
            if isinstance(expected, (list, tuple)):
                expected = [float(x) for x in expected]
            else:
                expected = float(expected)
        return _compare(actual, flt.op, expected)
    if flt.kind == "frequency":
        return _compare(freq_by_record[record.record_id], flt.op, int(flt.value))
    if flt.kind == "event_occurrence":
        name = str(flt.value)
        if name not in log.alphabet:
            raise UnknownAttribute(f"unknown event type {name!r}")
        present = log.alphabet.id_of(name) in record.sequence
        if flt.op == "=":
            return present
        if flt.op == "!=":
            return not present
        raise TypeMismatch("event_occurrence supports only = and !=")
    if flt.kind == "date_range":
        if flt.op != "in" or not isinstance(flt.value, (list, tuple)) or len(flt.value) != 2:
            raise TypeMismatch("date_range needs op 'in' and a [start, end] value")
        start = parse_timestamp(str(flt.value[0]))
        end = parse_timestamp(str(flt.value[1]))
        ts = record.events[0][1]
        return start <= ts <= end
    dt = _first_event_dt(record)
    if flt.kind == "day_of_week":
        actual = dt.isoweekday()  # Monday=1 .. Sunday=7
    elif flt.kind == "month":
        actual = dt.month
    else:  # year
        actual = dt.year
    expected = flt.value
    if isinstance(expected, (list, tuple)):
        expected = [int(x) for x in expected]
    else:
        expected = int(expected)
    return _compare(actual, flt.op, expected)


def apply_filters(log: EventLog, filters: Sequence[Filter]) -> EventLog:
    """Sub-log of records satisfying the conjunction of all filters.

    May return an empty log; callers treat that as an EmptyResult and skip
    tree building.
    """
    if not filters:
        return log
    freq_by_record: dict[str, int] = {}
    counts: dict[tuple[int, ...], int] = {}
    for record in log.records:
        counts[record.sequence] = counts.get(record.sequence, 0) + 1
    for record in log.records:
        freq_by_record[record.record_id] = counts[record.sequence]

    kept = tuple(
        record
        for record in log.records
        if all(_record_matches(record, f, log, freq_by_record) for f in filters)
    )
    return EventLog(
        records=kept, alphabet=log.alphabet, attribute_schema=log.attribute_schema
    )


# --- selections --------------------------------------------------------------


def resolve_selection(
    scope: str,
    ids: Sequence,
    uset: UniqueSequenceSet,
    members_of_node,
) -> Selection:
    """Resolve a selection to concrete record ids.

    ``members_of_node`` maps a tree node id to its unique-sequence indices.
    Cell selections are (node_id, row_index) pairs addressing one alignment
    row, i.e. one unique sequence.
    """
    record_ids: list[str] = []
    if scope == "clusters":
        for node_id in ids:
            for seq_idx in members_of_node(int(node_id)):
                record_ids.extend(uset.sequences[seq_idx].member_record_ids)
    elif scope == "unique_sequences":
        for seq_idx in ids:
            if not 0 <= int(seq_idx) < uset.N:
                raise UnknownId(f"unique sequence {seq_idx} out of range")
            record_ids.extend(uset.sequences[int(seq_idx)].member_record_ids)
    elif scope == "cells":
        for node_id, row in ids:
            members = members_of_node(int(node_id))
            if not 0 <= int(row) < len(members):
                raise UnknownId(f"row {row} not in node {node_id}")
            record_ids.extend(uset.sequences[members[int(row)]].member_record_ids)
    else:
        raise UnknownId(f"unknown selection scope {scope!r}")
    return Selection(scope=scope, ids=tuple(ids), resolved_record_ids=tuple(record_ids))


# --- attribute aggregation ----------------------------------------------------


def _freedman_diaconis_width(values: list[float]) -> float:
    if len(values) < 2:
        return 10.0
    arr = np.asarray(values, dtype=np.float64)
    q75, q25 = np.percentile(arr, [75, 25])
    iqr = q75 - q25
    if iqr <= 0:
        spread = float(arr.max() - arr.min())
        return spread / 10 if spread > 0 else 10.0
    return float(2.0 * iqr / len(arr) ** (1.0 / 3.0))


def _numeric_bins(values: list[float], width: float | None) -> list[tuple[float, float]]:
    lo, hi = min(values), max(values)
    w = width if width else _freedman_diaconis_width(values)
    if w <= 0:
        w = 10.0
    start = math.floor(lo / w) * w
    edges = [start]
    while edges[-1] < hi or len(edges) == 1:
        edges.append(edges[-1] + w)
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def _bin_label(lo: float, hi: float) -> str:
    def fmt(x: float) -> str:
        return str(int(x)) if float(x).is_integer() else f"{x:g}"

    return f"[{fmt(lo)}, {fmt(hi)})"


def _date_bin(value: str) -> str:
    # calendar-month bins for date attributes
    return str(value)[:7]


def attribute_aggregate(
    chart_type: str,
    attribute: str,
    series_records: Sequence[tuple[str, Sequence[IndividualRecord]]],
    schema: Mapping[str, str],
    bin_width: Mapping[str, float] | None = None,
) -> StackedBarData:
    """Stacked-bar data: one series per group of records, one bar per bin.

    Numeric attributes use fixed-width bins (automatic width unless
    overridden per attribute), categorical attributes one bin per distinct
    value, date attributes calendar-month bins. Records missing the
    attribute fall into a ``(missing)`` bin so per-series totals always equal
    the series' record count.
    """
    if attribute not in schema:
        raise UnknownAttribute(f"unknown attribute {attribute!r}")
    kind = schema[attribute]

    all_values = [
        record.attributes.get(attribute)
        for _, records in series_records
        for record in records
    ]
    present = [v for v in all_values if v is not None]

    if kind == "numeric" and present:
        width = (bin_width or {}).get(attribute)
        ranges = _numeric_bins([float(v) for v in present], width)
        bins = [_bin_label(lo, hi) for lo, hi in ranges]

        def bin_of(value) -> str | None:
            if value is None:
                return None
            x = float(value)
            for (lo, hi), label in zip(ranges, bins):
                if lo <= x < hi:
                    return label
            return bins[-1]  # max value falls in the last (closed) bin

    elif kind == "date" and present:
        bins = sorted({_date_bin(v) for v in present})

        def bin_of(value) -> str | None:
            return None if value is None else _date_bin(value)

    else:
        bins = sorted({str(v) for v in present})

        def bin_of(value) -> str | None:
            return None if value is None else str(value)

    has_missing = any(v is None for v in all_values)
    labels = list(bins) + ([_MISSING_BIN] if has_missing else [])
    index = {label: i for i, label in enumerate(labels)}

    series_out = []
    for name, records in series_records:
        counts = [0] * len(labels)
        for record in records:
            label = bin_of(record.attributes.get(attribute))
            counts[index[label if label is not None else _MISSING_BIN]] += 1
        series_out.append((name, tuple(counts)))

    return StackedBarData(
        attribute=attribute,
        chart_type=chart_type,
        bins=tuple(labels),
        series=tuple(series_out),
    )


# --- alignment by anchor events ------------------------------------------------


@dataclass(frozen=True)
class AnchorOffsets:
    offsets: tuple[int, ...]  # per sequence, columns to shift right
    unanchored: tuple[bool, ...]
    # events strictly between the first anchor and the first occurrence of
    # the second anchor after it; None without a second anchor match
    inter_anchor_events: tuple[int | None, ...] | None


def align_by_event(
    sequences: Sequence[Sequence[int]], anchors: Sequence[int]
) -> AnchorOffsets:
    """Column offsets that line up the first occurrence of an anchor event.

    With two anchors the segment length between them is reported per
    sequence so the caller can right-justify the second anchor column.
    """
    if not anchors or len(anchors) > 2:
        raise ValueError("align_by_event needs 1 or 2 anchor events")
    first = anchors[0]
    positions: list[int | None] = []
    for seq in sequences:
        positions.append(list(seq).index(first) if first in seq else None)
    anchored = [p for p in positions if p is not None]
    pivot = max(anchored) if anchored else 0
    offsets = tuple(pivot - p if p is not None else 0 for p in positions)
    unanchored = tuple(p is None for p in positions)

    inter: tuple[int | None, ...] | None = None
    if len(anchors) == 2:
        second = anchors[1]
        spans: list[int | None] = []
        for seq, p in zip(sequences, positions):
            if p is None:
                spans.append(None)
                continue
            rest = list(seq[p + 1 :])
            if second in rest:
                spans.append(rest.index(second))
            else:
                spans.append(None)
        inter = tuple(spans)
    return AnchorOffsets(offsets=offsets, unanchored=unanchored, inter_anchor_events=inter)


# --- sequence retrieval ---------------------------------------------------------


def unique_sequence_payloads(
    uset: UniqueSequenceSet,
    indices: Iterable[int],
    alphabet,
    *,
    sort: str = "frequency",
    similarity_rank: Mapping[int, int] | None = None,
) -> list[dict]:
    """Unique-sequence payloads: ids, event names, frequency, sort keys."""
    out = []
    for idx in indices:
        if not 0 <= idx < uset.N:
            raise UnknownId(f"unique sequence {idx} out of range")
        u = uset.sequences[idx]
        out.append(
            {
                "uid": idx,
                "sequence": list(u.sequence),
                "events": [alphabet.name_of(e) for e in u.sequence],
                "frequency": u.frequency,
            }
        )
    if sort == "similarity" and similarity_rank is not None:
        out.sort(key=lambda p: similarity_rank.get(p["uid"], len(similarity_rank)))
    else:
        out.sort(key=lambda p: (-p["frequency"], p["uid"]))
    return out


def individual_record_payloads(
    log: EventLog,
    record_ids: Iterable[str],
    attrs: Sequence[str] = (),
) -> list[dict]:
    """Individual-record payloads: timestamped events with durations plus
    the requested attribute columns. Duration is the delta to the next
    event; the last event gets 0."""
    for name in attrs:
        if name not in log.attribute_schema:
            raise UnknownAttribute(f"unknown attribute {name!r}")
    by_id = {record.record_id: record for record in log.records}
    out = []
    for rid in record_ids:
        if rid not in by_id:
            raise UnknownId(f"unknown record {rid!r}")
        record = by_id[rid]
        events = []
        for pos, (type_id, ts) in enumerate(record.events):
            nxt = record.events[pos + 1][1] if pos + 1 < len(record.events) else ts
            events.append(
                {
                    "event": log.alphabet.name_of(type_id),
                    "timestamp_ms": ts,
                    "duration_ms": nxt - ts,
                    "attrs": dict(record.event_attrs[pos])
                    if pos < len(record.event_attrs)
                    else {},
                }
            )
        out.append(
            {
                "record_id": rid,
                "events": events,
                "attributes": {name: record.attributes.get(name) for name in attrs},
            }
        )
    return out
