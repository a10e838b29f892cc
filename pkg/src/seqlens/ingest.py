"""Event-log ingestion: CSV parsing, alphabet construction, deduplication.

Input formats (documented in the README):

* events CSV, UTF-8, RFC-4180 quoting, header
  ``record_id,event_type,timestamp[,k=v event attrs...]``; timestamps are
  ISO-8601 (naive timestamps are treated as UTC).
* attributes CSV, header ``record_id,<attr1>,<attr2>,...``; one row per
  record, keyed by record_id.

Parsed logs are immutable; every downstream stage shares them freely.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Mapping

from .errors import EmptyDataset, MalformedRow, UnknownRecord

GAP_NAME = "--"

_DATE_PATTERNS = (
    re.compile(r"^\d{4}-\d{2}-\d{2}$"),
    re.compile(r"^\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}"),
    re.compile(r"^\d{2}/\d{2}/\d{4}$"),
)


@dataclass(frozen=True)
class EventType:
    id: int
    name: str


class Alphabet:
    """Bijection between event-type names and dense 0-based integer ids.

    One id is reserved for the gap symbol inserted by alignment: it is
    ``len(alphabet)``, i.e. always the largest id + 1, and never appears in
    input sequences.
    """

    def __init__(self, names: Iterable[str]):
        self.types: tuple[EventType, ...] = tuple(
            EventType(i, name) for i, name in enumerate(names)
        )
        self._by_name = {t.name: t.id for t in self.types}
        if len(self._by_name) != len(self.types):
            raise ValueError("duplicate event-type names")
        if GAP_NAME in self._by_name:
            raise ValueError(f"event-type name {GAP_NAME!r} is reserved for gaps")

    @property
    def gap_id(self) -> int:
        return len(self.types)

    def id_of(self, name: str) -> int:
        return self._by_name[name]

    def name_of(self, type_id: int) -> str:
        if type_id == self.gap_id:
            return GAP_NAME
        return self.types[type_id].name

    def names(self) -> list[str]:
        return [t.name for t in self.types]

    def __len__(self) -> int:
        return len(self.types)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.types == other.types

    def __repr__(self) -> str:
        return f"Alphabet({len(self)} event types)"


@dataclass(frozen=True)
class IndividualRecord:
    record_id: str
    # (event type id, UTC milliseconds), sorted non-decreasing by timestamp
    events: tuple[tuple[int, int], ...]
    attributes: Mapping[str, object] = field(default_factory=dict)
    # per-event attributes parsed from trailing k=v columns, parallel to events
    event_attrs: tuple[Mapping[str, str], ...] = ()

    @property
    def sequence(self) -> tuple[int, ...]:
        return tuple(e[0] for e in self.events)


@dataclass(frozen=True)
class EventLog:
    records: tuple[IndividualRecord, ...]
    alphabet: Alphabet
    attribute_schema: Mapping[str, str]  # name -> categorical | numeric | date

    @property
    def total_records(self) -> int:
        return len(self.records)

    @property
    def is_empty(self) -> bool:
        return not self.records


@dataclass(frozen=True)
class UniqueSequence:
    sequence: tuple[int, ...]
    frequency: int
    member_record_ids: tuple[str, ...]


@dataclass(frozen=True)
class UniqueSequenceSet:
    sequences: tuple[UniqueSequence, ...]

    @property
    def N(self) -> int:
        return len(self.sequences)

    def frequencies(self) -> list[int]:
        return [u.frequency for u in self.sequences]


def parse_timestamp(raw: str) -> int:
    """ISO-8601 string -> UTC milliseconds. Naive inputs are taken as UTC."""
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedRow(f"unparseable timestamp {raw!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)


def _parse_event_attrs(tokens: list[str], line_no: int) -> dict[str, str]:
    attrs: dict[str, str] = {}
    for token in tokens:
        if not token:
            continue
        if "=" not in token:
            raise MalformedRow(
                f"line {line_no}: event attribute {token!r} is not 'key=value'"
            )
        key, value = token.split("=", 1)
        attrs[key] = value
    return attrs


def parse_event_log(
    events_file: IO[str],
    attributes_file: IO[str] | None = None,
    schema_overrides: Mapping[str, str] | None = None,
) -> EventLog:
    """Parse the events CSV (and optional attributes CSV) into an EventLog.

    Events are stably re-sorted by timestamp per record, so rows that appear
    out of order are fixed while equal timestamps keep file order. The
    alphabet assigns ids in first-appearance order.
    """
    reader = csv.reader(events_file)
    header = next(reader, None)
    if header is None:
        raise EmptyDataset("events file is empty")
    if len(header) < 3:
        raise MalformedRow(f"events header needs >= 3 columns, got {header}")

    names: list[str] = []
    name_ids: dict[str, int] = {}
    # record_id -> list of (ts, file order, type id, event attrs)
    pending: dict[str, list[tuple[int, int, int, dict[str, str]]]] = {}
    order = 0
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < 3:
            raise MalformedRow(f"line {line_no}: expected >= 3 fields, got {len(row)}")
        record_id, type_name, ts_raw = row[0], row[1], row[2]
        ts = parse_timestamp(ts_raw)
        if type_name not in name_ids:
            name_ids[type_name] = len(names)
            names.append(type_name)
        attrs = _parse_event_attrs(row[3:], line_no)
        pending.setdefault(record_id, []).append((ts, order, name_ids[type_name], attrs))
        order += 1

    if not pending:
        raise EmptyDataset("events file has a header but no data rows")

    record_attrs: dict[str, dict[str, str]] = {}
    attr_names: list[str] = []
    if attributes_file is not None:
        attr_names, record_attrs = _parse_attributes(attributes_file, pending.keys())

    schema = _infer_schema(attr_names, record_attrs, schema_overrides)

    records = []
    for record_id, rows in pending.items():
        rows.sort(key=lambda r: r[0])  # stable: ties keep file order
        events = tuple((type_id, ts) for ts, _, type_id, _ in rows)
        event_attrs = tuple(attrs for _, _, _, attrs in rows)
        attributes = _typed_attributes(record_attrs.get(record_id, {}), schema)
        records.append(
            IndividualRecord(
                record_id=record_id,
                events=events,
                attributes=attributes,
                event_attrs=event_attrs,
            )
        )

    return EventLog(
        records=tuple(records),
        alphabet=Alphabet(names),
        attribute_schema=schema,
    )


def _parse_attributes(
    attributes_file: IO[str], known_ids: Iterable[str]
) -> tuple[list[str], dict[str, dict[str, str]]]:
    known = set(known_ids)
    reader = csv.reader(attributes_file)
    header = next(reader, None)
    if header is None or len(header) < 2:
        return [], {}
    attr_names = header[1:]
    out: dict[str, dict[str, str]] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(
                f"attributes line {line_no}: expected {len(header)} fields, got {len(row)}"
            )
        record_id = row[0]
        if record_id not in known:
            raise UnknownRecord(f"attributes line {line_no}: unknown record {record_id!r}")
        out[record_id] = dict(zip(attr_names, row[1:]))
    return attr_names, out


def _looks_numeric(value: str) -> bool:
    try:
        float(value)
        return True
    except ValueError:
        return False


def _looks_date(value: str) -> bool:
    return any(p.match(value.strip()) for p in _DATE_PATTERNS)


def _infer_schema(
    attr_names: list[str],
    record_attrs: dict[str, dict[str, str]],
    overrides: Mapping[str, str] | None,
) -> dict[str, str]:
    schema: dict[str, str] = {}
    for name in attr_names:
        values = [
            attrs[name]
            for attrs in record_attrs.values()
            if name in attrs and attrs[name] != ""
        ]
        if values and all(_looks_numeric(v) for v in values):
            schema[name] = "numeric"
        elif values and all(_looks_date(v) for v in values):
            schema[name] = "date"
        else:
            schema[name] = "categorical"
    if overrides:
        for name, kind in overrides.items():
            if kind not in ("categorical", "numeric", "date"):
                raise ValueError(f"unknown attribute type {kind!r} for {name!r}")
            schema[name] = kind
    return schema


def _typed_attributes(
    raw: Mapping[str, str], schema: Mapping[str, str]
) -> dict[str, object]:
    typed: dict[str, object] = {}
    for name, value in raw.items():
        if value == "":
            typed[name] = None
        elif schema.get(name) == "numeric":
            try:
                typed[name] = float(value)
            except ValueError:
                typed[name] = None
        else:
            typed[name] = value
    return typed


def deduplicate(log: EventLog) -> UniqueSequenceSet:
    """Collapse records with identical event-id sequences.

    Canonical order: descending frequency, then lexicographic by id list.
    Member record ids keep ingestion order, so the grouping is insensitive
    to record permutations in the file.
    """
    if log.is_empty:
        raise EmptyDataset("cannot deduplicate an empty log")
    groups: dict[tuple[int, ...], list[str]] = {}
    for record in log.records:
        groups.setdefault(record.sequence, []).append(record.record_id)
    uniques = [
        UniqueSequence(sequence=seq, frequency=len(ids), member_record_ids=tuple(ids))
        for seq, ids in groups.items()
    ]
    uniques.sort(key=lambda u: (-u.frequency, u.sequence))
    return UniqueSequenceSet(sequences=tuple(uniques))
