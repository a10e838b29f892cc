"""HTTP service: build datasets, serve overviews and analytics.

Datasets are built once (per filter signature) into immutable snapshots;
all read endpoints are side-effect-free, idempotent, and return canonical
JSON, so identical requests produce byte-identical payloads. Builds run in
a background worker, at most one per dataset at a time.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path

from fastapi import FastAPI, File, Request, UploadFile
from fastapi.responses import Response

from . import __version__ as PACKAGE_VERSION
from .aggtree import (
    AggregateTree,
    Frontier,
    build_aggregate_tree,
    content_hash,
    cut_at_k,
    load_tree_cache,
    save_tree_cache,
    split_node,
)
from .alignment import AlignParams
from .analytics import (
    Filter,
    apply_filters,
    attribute_aggregate,
    align_by_event,
    filter_signature,
    individual_record_payloads,
    resolve_selection,
    unique_sequence_payloads,
)
from .config import EngineConfig
from .distance import DistanceMatrix, distance_matrix
from .errors import (
    BadThreshold,
    EmptyResult,
    EngineError,
    NodeNotInFrontier,
    TypeMismatch,
    UnknownAttribute,
    UnknownId,
    UnknownNode,
)
from .ingest import EventLog, UniqueSequenceSet, deduplicate, parse_event_log
from .quality import SilhouetteCurve, silhouette_curve
from .representation import ClusterView

API_VERSION = "1"

_NOT_FOUND = (UnknownNode, UnknownId)
_CONFLICT_STATUS = 409


def canonical_json(payload) -> bytes:
    """Deterministic JSON: sorted keys, no whitespace, exact float reprs."""
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


def canonical_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


@dataclass(frozen=True)
class Snapshot:
    """One immutable built dataset (per filter signature)."""

    log: EventLog
    uset: UniqueSequenceSet
    dmatrix: DistanceMatrix | None  # None when only one unique sequence
    tree: AggregateTree
    curve: SilhouetteCurve
    filters: tuple[Filter, ...]
    filters_sig: str
    key: str  # content hash of (dataset, filters, q, align params)

    def members_of_node(self, node_id: int):
        return self.tree.node(node_id).members

    def similarity_rank(self) -> dict[int, int]:
        return {uid: pos for pos, uid in enumerate(self.tree.dendrogram_leaf_order())}


@dataclass
class _Build:
    status: str = "building"  # building | ready | failed
    error: str | None = None
    snapshot: Snapshot | None = None


@dataclass
class _Dataset:
    dataset_id: str
    log: EventLog
    fingerprint: str
    builds: dict[str, _Build] = field(default_factory=dict)
    filters_by_sig: dict[str, tuple[Filter, ...]] = field(default_factory=dict)
    build_lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass(frozen=True)
class SessionState:
    """Validated per-request view state.

    The server itself is stateless: clients carry their k / threshold /
    frontier / selections and this object checks them against the snapshot.
    """

    dataset_id: str
    filters_sig: str
    itau: float
    k: int | None = None
    frontier_ids: tuple[int, ...] | None = None

    def validated_frontier(self, snapshot: Snapshot) -> Frontier:
        if not 0.0 <= self.itau <= 1.0:
            raise BadThreshold(f"itau={self.itau} outside [0, 1]")
        tree = snapshot.tree
        if self.frontier_ids is not None:
            seen: set[int] = set()
            for node_id in self.frontier_ids:
                seen.update(tree.node(node_id).members)
            covered = sum(len(tree.node(i).members) for i in self.frontier_ids)
            if len(seen) != tree.N or covered != tree.N:
                raise NodeNotInFrontier("frontier does not partition the sequences")
            return Frontier(node_ids=tuple(self.frontier_ids))
        k = self.k if self.k is not None else 1
        return cut_at_k(tree, k)


class DatasetStore:
    """In-memory registry of datasets plus the background build worker."""

    def __init__(self, config: EngineConfig | None = None, cache_dir: str | None = None):
        self.config = config or EngineConfig()
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._datasets: dict[str, _Dataset] = {}
        self._lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=2)

    # -- registration ---------------------------------------------------

    def create_dataset(self, events_text: str, attrs_text: str | None) -> str:
        fingerprint = hashlib.sha256(
            (events_text + "\x00" + (attrs_text or "")).encode("utf-8")
        ).hexdigest()
        dataset_id = fingerprint[:12]
        with self._lock:
            if dataset_id in self._datasets:
                return dataset_id
        log = parse_event_log(
            StringIO(events_text),
            StringIO(attrs_text) if attrs_text else None,
        )
        entry = _Dataset(dataset_id=dataset_id, log=log, fingerprint=fingerprint)
        with self._lock:
            self._datasets[dataset_id] = entry
        self.start_build(dataset_id, ())
        return dataset_id

    def register_prebuilt(self, dataset_id: str, log: EventLog, snapshot: Snapshot):
        entry = _Dataset(dataset_id=dataset_id, log=log, fingerprint=snapshot.key)
        entry.builds[snapshot.filters_sig] = _Build(status="ready", snapshot=snapshot)
        entry.filters_by_sig[snapshot.filters_sig] = snapshot.filters
        with self._lock:
            self._datasets[dataset_id] = entry

    def dataset(self, dataset_id: str) -> _Dataset:
        with self._lock:
            if dataset_id not in self._datasets:
                raise UnknownId(f"unknown dataset {dataset_id!r}")
            return self._datasets[dataset_id]

    # -- builds -----------------------------------------------------------

    def start_build(self, dataset_id: str, filters: tuple[Filter, ...]) -> str:
        entry = self.dataset(dataset_id)
        sig = filter_signature(filters)
        with self._lock:
            if sig in entry.builds and entry.builds[sig].status != "failed":
                return sig
            entry.builds[sig] = _Build()
            entry.filters_by_sig[sig] = filters
        self._executor.submit(self._run_build, entry, sig, filters)
        return sig

    def _run_build(self, entry: _Dataset, sig: str, filters: tuple[Filter, ...]):
        with entry.build_lock:  # one build per dataset at a time
            try:
                snapshot = build_snapshot(
                    entry.log,
                    filters,
                    self.config,
                    fingerprint=entry.fingerprint,
                    cache_dir=self.cache_dir,
                )
            except Exception as exc:  # failures are reported via status
                entry.builds[sig].status = "failed"
                entry.builds[sig].error = f"{type(exc).__name__}: {exc}"
                return
        entry.builds[sig].snapshot = snapshot
        entry.builds[sig].status = "ready"

    def build_status(self, dataset_id: str, sig: str) -> _Build:
        entry = self.dataset(dataset_id)
        if sig not in entry.builds:
            raise UnknownId(f"no build for filters_sig {sig!r}")
        return entry.builds[sig]

    def snapshot(self, dataset_id: str, sig: str) -> Snapshot:
        build = self.build_status(dataset_id, sig)
        if build.status == "building":
            raise _StillBuilding(dataset_id)
        if build.status == "failed":
            raise EmptyResult(build.error or "build failed")
        assert build.snapshot is not None
        return build.snapshot


class _StillBuilding(Exception):
    pass


def build_snapshot(
    log: EventLog,
    filters: tuple[Filter, ...],
    config: EngineConfig,
    *,
    fingerprint: str = "",
    cache_dir: Path | None = None,
    prebuilt_tree: AggregateTree | None = None,
) -> Snapshot:
    """Run the full pipeline on the (filtered) log and freeze the result."""
    sub = apply_filters(log, list(filters))
    if sub.is_empty:
        raise EmptyResult("filters removed every record")
    sig = filter_signature(filters)
    uset = deduplicate(sub)
    params = AlignParams(
        gap_open_penalty=config.gap_open_penalty,
        match_score=config.match_score,
        mismatch_score=config.mismatch_score,
    )
    key = content_hash(fingerprint, sig, config.q, params)

    tree = prebuilt_tree
    cache_path = cache_dir / f"tree_{key}.json" if cache_dir else None
    if tree is None and cache_path is not None and cache_path.exists():
        cached, _, cached_key = load_tree_cache(cache_path)
        if cached_key == key and cached.sequences == tuple(
            u.sequence for u in uset.sequences
        ):
            tree = cached

    dmat = distance_matrix(uset, config.q) if uset.N >= 2 else None
    if tree is None:
        tree = build_aggregate_tree(
            uset,
            gap=sub.alphabet.gap_id,
            q=config.q,
            params=params,
            allow_single=True,
            simplify_memo_size=config.simplify_memo_size,
            precomputed=dmat,
        )
        if cache_path is not None:
            cache_dir.mkdir(parents=True, exist_ok=True)
            save_tree_cache(cache_path, tree, sub.alphabet.names(), key)

    curve = (
        silhouette_curve(tree, dmat, max_recommendations=config.max_recommendations)
        if dmat is not None
        else SilhouetteCurve(values={}, recommendations=())
    )
    return Snapshot(
        log=sub,
        uset=uset,
        dmatrix=dmat,
        tree=tree,
        curve=curve,
        filters=tuple(filters),
        filters_sig=sig,
        key=key,
    )


# --- payload builders ---------------------------------------------------------


def cluster_view_payload(view: ClusterView) -> dict:
    return {
        "node_id": view.node_id,
        "record_count": view.record_count,
        "record_share": view.record_share,
        "small_cluster": view.small_cluster,
        "merged_columns": list(view.merged_columns),
        "column_origin": [list(pair) for pair in view.column_origin],
        "rows": [
            {
                "uid": uid,
                "frequency": freq,
                "cells": [list(cell) for cell in row_cells],
            }
            for uid, freq, row_cells in zip(
                view.row_sequence_ids, view.row_freqs, view.cells
            )
        ],
    }


def overview_payload(
    snapshot: Snapshot,
    state: SessionState,
    order: str,
    config: EngineConfig,
) -> dict:
    frontier = state.validated_frontier(snapshot)
    tree = snapshot.tree
    views = [
        tree.cluster_view(node_id, state.itau, config.small_cluster_threshold)
        for node_id in frontier.node_ids
    ]
    if order == "frequency":
        views.sort(key=lambda v: (-v.record_count, v.node_id))
    elif order != "similarity":
        raise TypeMismatch(f"unknown order {order!r}")

    silhouette = None
    if state.k is not None and state.k in snapshot.curve.values:
        silhouette = snapshot.curve.values[state.k]

    return {
        "api_version": API_VERSION,
        "engine_version": PACKAGE_VERSION,
        "dataset_id": state.dataset_id,
        "filters_sig": state.filters_sig,
        "n_unique": tree.N,
        "total_records": tree.total_records,
        "k": state.k if state.k is not None else len(frontier),
        "frontier": list(frontier.node_ids),
        "itau": state.itau,
        "order": order,
        "silhouette": silhouette,
        "recommended_k": list(snapshot.curve.recommendations),
        "alphabet": snapshot.log.alphabet.names(),
        "clusters": [cluster_view_payload(v) for v in views],
    }


def _parse_scope(scope: str) -> tuple[str, list]:
    if ":" not in scope:
        raise TypeMismatch("scope must look like 'clusters:1,2' or 'unique:0,3'")
    kind, raw = scope.split(":", 1)
    ids: list = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        if kind == "cells":
            node, row = token.split(".")
            ids.append((int(node), int(row)))
        else:
            ids.append(int(token))
    mapping = {"clusters": "clusters", "unique": "unique_sequences", "cells": "cells"}
    if kind not in mapping:
        raise TypeMismatch(f"unknown scope kind {kind!r}")
    return mapping[kind], ids


# --- the FastAPI app ------------------------------------------------------------


def create_app(store: DatasetStore | None = None) -> FastAPI:
    store = store or DatasetStore()
    app = FastAPI(title="seqlens", version=PACKAGE_VERSION)
    app.state.store = store

    def error_payload(code: str, message: str) -> dict:
        return {"api_version": API_VERSION, "error": code, "message": message}

    @app.exception_handler(EngineError)
    async def engine_error_handler(_req: Request, exc: EngineError):
        if isinstance(exc, _NOT_FOUND):
            status = 404
        else:
            status = 400
        return canonical_response(
            error_payload(type(exc).__name__, str(exc)), status_code=status
        )

    @app.exception_handler(_StillBuilding)
    async def building_handler(_req: Request, exc: _StillBuilding):
        return canonical_response(
            error_payload("StillBuilding", f"dataset {exc.args[0]} is building"),
            status_code=_CONFLICT_STATUS,
        )

    @app.post("/datasets", status_code=202)
    async def create_dataset(
        events: UploadFile = File(...),
        attributes: UploadFile | None = File(None),
    ):
        events_text = (await events.read()).decode("utf-8")
        attrs_text = (await attributes.read()).decode("utf-8") if attributes else None
        dataset_id = store.create_dataset(events_text, attrs_text)
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "job_id": f"{dataset_id}:",
                "status": "building",
            },
            status_code=202,
        )

    @app.get("/datasets/{dataset_id}/status")
    def dataset_status(dataset_id: str, filters_sig: str = ""):
        build = store.build_status(dataset_id, filters_sig)
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "filters_sig": filters_sig,
                "status": build.status,
                "error": build.error,
            }
        )

    @app.get("/datasets/{dataset_id}/overview")
    def overview(
        dataset_id: str,
        k: int | None = None,
        itau: float = 0.0,
        order: str = "similarity",
        filters_sig: str = "",
        frontier: str | None = None,
    ):
        snapshot = store.snapshot(dataset_id, filters_sig)
        frontier_ids = (
            tuple(int(x) for x in frontier.split(",") if x.strip())
            if frontier
            else None
        )
        if k is None and frontier_ids is None:
            k = min(snapshot.tree.N, 200)  # initial overview default
        state = SessionState(
            dataset_id=dataset_id,
            filters_sig=filters_sig,
            itau=itau,
            k=k,
            frontier_ids=frontier_ids,
        )
        return canonical_response(overview_payload(snapshot, state, order, store.config))

    @app.get("/datasets/{dataset_id}/recommendations")
    def recommendations(dataset_id: str, filters_sig: str = ""):
        snapshot = store.snapshot(dataset_id, filters_sig)
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "filters_sig": filters_sig,
                "recommended_k": list(snapshot.curve.recommendations),
                "curve": [[k, snapshot.curve.values[k]] for k in sorted(snapshot.curve.values)],
            }
        )

    @app.post("/datasets/{dataset_id}/filters")
    async def set_filters(dataset_id: str, request: Request):
        body = await request.json()
        raw = body.get("filters", [])
        filters = tuple(Filter.from_dict(f) for f in raw)
        log = store.dataset(dataset_id).log
        # validate eagerly so bad filters fail now, not in the worker
        for f in filters:
            if f.kind == "attribute" and f.attribute not in log.attribute_schema:
                raise UnknownAttribute(f"unknown attribute {f.attribute!r}")
            if f.kind == "event_occurrence" and str(f.value) not in log.alphabet:
                raise UnknownAttribute(f"unknown event type {f.value!r}")
        sig = store.start_build(dataset_id, filters)
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "filters_sig": sig,
                "status": store.build_status(dataset_id, sig).status,
            },
            status_code=202,
        )

    @app.post("/datasets/{dataset_id}/frontier/split")
    async def frontier_split(dataset_id: str, request: Request):
        body = await request.json()
        filters_sig = body.get("filters_sig", "")
        snapshot = store.snapshot(dataset_id, filters_sig)
        if "frontier" in body and body["frontier"]:
            frontier = Frontier(node_ids=tuple(int(x) for x in body["frontier"]))
        elif "k" in body:
            frontier = cut_at_k(snapshot.tree, int(body["k"]))
        else:
            raise TypeMismatch("split needs 'frontier' or 'k'")
        node_id = int(body["node_id"])
        new_frontier = split_node(snapshot.tree, frontier, node_id)
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "filters_sig": filters_sig,
                "frontier": list(new_frontier.node_ids),
            }
        )

    @app.get("/datasets/{dataset_id}/clusters/{node_id}/unique-sequences")
    def cluster_uniques(
        dataset_id: str,
        node_id: int,
        sort: str = "frequency",
        filters_sig: str = "",
        anchors: str | None = None,
    ):
        snapshot = store.snapshot(dataset_id, filters_sig)
        members = snapshot.members_of_node(node_id)
        payloads = unique_sequence_payloads(
            snapshot.uset,
            members,
            snapshot.log.alphabet,
            sort=sort,
            similarity_rank=snapshot.similarity_rank(),
        )
        anchor_info = None
        if anchors:
            names = [a for a in anchors.split(",") if a]
            for name in names:
                if name not in snapshot.log.alphabet:
                    raise UnknownAttribute(f"unknown event type {name!r}")
            ids = [snapshot.log.alphabet.id_of(name) for name in names]
            offsets = align_by_event([p["sequence"] for p in payloads], ids)
            anchor_info = {
                "anchors": names,
                "offsets": list(offsets.offsets),
                "unanchored": list(offsets.unanchored),
                "inter_anchor_events": list(offsets.inter_anchor_events)
                if offsets.inter_anchor_events is not None
                else None,
            }
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "node_id": node_id,
                "sort": sort,
                "unique_sequences": payloads,
                "anchor_alignment": anchor_info,
            }
        )

    @app.get("/datasets/{dataset_id}/unique/{uid}/records")
    def unique_records(
        dataset_id: str, uid: int, attrs: str = "", filters_sig: str = ""
    ):
        snapshot = store.snapshot(dataset_id, filters_sig)
        if not 0 <= uid < snapshot.uset.N:
            raise UnknownId(f"unique sequence {uid} out of range")
        attr_names = [a for a in attrs.split(",") if a]
        records = individual_record_payloads(
            snapshot.log,
            snapshot.uset.sequences[uid].member_record_ids,
            attr_names,
        )
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "uid": uid,
                "frequency": snapshot.uset.sequences[uid].frequency,
                "records": records,
            }
        )

    @app.get("/datasets/{dataset_id}/aggregate")
    def aggregate_attribute(
        dataset_id: str,
        chart: str,
        attribute: str,
        filters_sig: str = "",
        k: int | None = None,
        node: int | None = None,
        scope: str | None = None,
    ):
        snapshot = store.snapshot(dataset_id, filters_sig)
        by_id = {record.record_id: record for record in snapshot.log.records}

        def records_for(ids):
            return [by_id[rid] for rid in ids]

        if chart == "cluster":
            frontier = cut_at_k(snapshot.tree, k if k is not None else 1)
            series = []
            for pos, fid in enumerate(frontier.node_ids):
                sel = resolve_selection(
                    "clusters", [fid], snapshot.uset, snapshot.members_of_node
                )
                series.append((f"C{pos + 1}", records_for(sel.resolved_record_ids)))
        elif chart == "sequence":
            if node is None:
                raise TypeMismatch("sequence charts need a node parameter")
            series = []
            for uid in snapshot.members_of_node(node):
                sel = resolve_selection(
                    "unique_sequences", [uid], snapshot.uset, snapshot.members_of_node
                )
                series.append((f"S{uid}", records_for(sel.resolved_record_ids)))
        elif chart == "selected_data":
            if not scope:
                raise TypeMismatch("selected_data charts need a scope parameter")
            scope_kind, ids = _parse_scope(scope)
            sel = resolve_selection(
                scope_kind, ids, snapshot.uset, snapshot.members_of_node
            )
            selected = set(sel.resolved_record_ids)
            series = [
                ("selected", records_for(sorted(selected))),
                (
                    "rest",
                    [r for r in snapshot.log.records if r.record_id not in selected],
                ),
            ]
        else:
            raise TypeMismatch(f"unknown chart type {chart!r}")

        data = attribute_aggregate(
            chart,
            attribute,
            series,
            snapshot.log.attribute_schema,
            store.config.bin_width,
        )
        return canonical_response(
            {
                "api_version": API_VERSION,
                "dataset_id": dataset_id,
                "attribute": data.attribute,
                "chart_type": data.chart_type,
                "bins": list(data.bins),
                "series": [
                    {"id": name, "counts": list(counts)} for name, counts in data.series
                ],
            }
        )

    @app.get("/datasets/{dataset_id}/silhouette.csv")
    def silhouette_csv(dataset_id: str, filters_sig: str = ""):
        snapshot = store.snapshot(dataset_id, filters_sig)
        return Response(content=snapshot.curve.to_csv(), media_type="text/csv")

    return app
