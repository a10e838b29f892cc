"""Command line interface mirroring the HTTP API for headless use.

``build`` writes a cache bundle (input copies, tree cache, metadata);
``overview`` and ``recommend`` read a bundle back without re-aligning;
``serve`` starts the HTTP service, optionally preloading bundles.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import sys
from io import StringIO
from pathlib import Path

import click

from .aggtree import content_hash, load_tree_cache, save_tree_cache
from .alignment import AlignParams
from .config import EngineConfig, load_config
from .errors import EngineError
from .ingest import deduplicate, parse_event_log
from .service import (
    DatasetStore,
    SessionState,
    Snapshot,
    build_snapshot,
    canonical_json,
    create_app,
    overview_payload,
)

META_NAME = "meta.json"


@click.group()
def main() -> None:
    """Multilevel overviews of temporal event sequences."""


def _load_bundle(cache: Path) -> tuple[Snapshot, EngineConfig]:
    meta = json.loads((cache / META_NAME).read_text(encoding="utf-8"))
    config = load_config(**meta["config"])
    events = (cache / "events.csv").read_text(encoding="utf-8")
    attrs_path = cache / "attributes.csv"
    attrs = attrs_path.read_text(encoding="utf-8") if attrs_path.exists() else None
    schema_path = cache / "schema.json"
    overrides = (
        json.loads(schema_path.read_text(encoding="utf-8"))
        if schema_path.exists()
        else None
    )
    log = parse_event_log(
        StringIO(events),
        StringIO(attrs) if attrs else None,
        schema_overrides=overrides,
    )
    tree, _, _ = load_tree_cache(cache / meta["tree_file"])
    snapshot = build_snapshot(
        log, (), config, fingerprint=meta["fingerprint"], prebuilt_tree=tree
    )
    return snapshot, config


@main.command()
@click.option("--events", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--attrs", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--q", type=int, default=None, help="q-gram length (default 1)")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option(
    "--schema",
    "schema_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="JSON side-file overriding inferred attribute types",
)
@click.option("--out", required=True, type=click.Path(path_type=Path))
def build(
    events: Path,
    attrs: Path | None,
    q: int | None,
    config_path,
    schema_path: Path | None,
    out: Path,
):
    """Ingest, deduplicate, and build the aggregate tree into a cache dir."""
    config = load_config(config_path, q=q)
    out.mkdir(parents=True, exist_ok=True)
    shutil.copy(events, out / "events.csv")
    if attrs:
        shutil.copy(attrs, out / "attributes.csv")
    if schema_path:
        shutil.copy(schema_path, out / "schema.json")

    events_text = (out / "events.csv").read_text(encoding="utf-8")
    attrs_text = (
        (out / "attributes.csv").read_text(encoding="utf-8") if attrs else None
    )
    fingerprint = hashlib.sha256(
        (events_text + "\x00" + (attrs_text or "")).encode("utf-8")
    ).hexdigest()

    overrides = (
        json.loads(schema_path.read_text(encoding="utf-8")) if schema_path else None
    )
    log = parse_event_log(
        StringIO(events_text),
        StringIO(attrs_text) if attrs_text else None,
        schema_overrides=overrides,
    )
    uset = deduplicate(log)
    snapshot = build_snapshot(log, (), config, fingerprint=fingerprint)
    params = AlignParams(
        gap_open_penalty=config.gap_open_penalty,
        match_score=config.match_score,
        mismatch_score=config.mismatch_score,
    )
    key = content_hash(fingerprint, "", config.q, params)
    tree_file = f"tree_{key}.json"
    save_tree_cache(out / tree_file, snapshot.tree, log.alphabet.names(), key)
    (out / META_NAME).write_text(
        json.dumps(
            {
                "fingerprint": fingerprint,
                "tree_file": tree_file,
                "config": {
                    "q": config.q,
                    "gap_open_penalty": config.gap_open_penalty,
                    "match_score": config.match_score,
                    "mismatch_score": config.mismatch_score,
                    "small_cluster_threshold": config.small_cluster_threshold,
                },
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    stats = snapshot.tree.stats
    click.echo(
        f"built {uset.N} unique sequences from {log.total_records} records, "
        f"{len(log.alphabet)} event types"
    )
    click.echo(
        f"timing: distance {stats.distance_seconds:.2f}s, "
        f"align {stats.align_seconds:.2f}s, score {stats.score_seconds:.2f}s, "
        f"total {stats.total_seconds:.2f}s"
    )
    click.echo(f"cache written to {out}")


@main.command()
@click.option("--cache", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--k", type=int, required=True)
@click.option("--itau", type=float, default=0.0)
@click.option("--order", type=click.Choice(["similarity", "frequency"]), default="similarity")
@click.option("--format", "fmt", type=click.Choice(["json", "svg-skeleton"]), default="json")
def overview(cache: Path, k: int, itau: float, order: str, fmt: str):
    """Print the overview at (k, itau) as JSON or a bare SVG skeleton."""
    snapshot, config = _load_bundle(cache)
    state = SessionState(dataset_id=cache.name, filters_sig="", itau=itau, k=k)
    payload = overview_payload(snapshot, state, order, config)
    if fmt == "json":
        click.echo(canonical_json(payload).decode("utf-8"))
    else:
        click.echo(_svg_skeleton(payload))


def _svg_skeleton(payload: dict) -> str:
    """Minimal SVG: one box per cluster row cell, heights by record share."""
    width, row_h, pad = 900, 10, 6
    parts = []
    y = pad
    for cluster in payload["clusters"]:
        height = max(2, int(cluster["record_share"] * 400))
        dotted = ' stroke-dasharray="3,3"' if cluster["small_cluster"] else ""
        n_cols = max(len(cluster["merged_columns"]), 1)
        cell_w = max(4, (width - 2 * pad) // n_cols)
        parts.append(
            f'<g data-node="{cluster["node_id"]}">'
            f'<rect x="{pad}" y="{y}" width="{width - 2 * pad}" height="{height}" '
            f'fill="none" stroke="black"{dotted}/>'
        )
        for row in cluster["rows"][:1]:  # skeleton: outline the first row only
            for col, cell in enumerate(row["cells"]):
                if cell:
                    parts.append(
                        f'<rect x="{pad + col * cell_w}" y="{y}" width="{cell_w - 1}" '
                        f'height="{min(height, row_h)}" fill="#888"/>'
                    )
        parts.append("</g>")
        y += height + pad
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{y}">'
        + "".join(parts)
        + "</svg>"
    )


@main.command()
@click.option("--cache", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--top", type=int, default=10)
def recommend(cache: Path, top: int):
    """Print the ranked recommended cluster counts."""
    snapshot, _ = _load_bundle(cache)
    recs = list(snapshot.curve.recommendations)[:top]
    for k in recs:
        click.echo(f"k={k}\tavg_silhouette_width={snapshot.curve.values[k]:.6f}")
    if not recs:
        click.echo("no recommendations (fewer than 3 unique sequences)")


@main.command()
@click.option("--port", type=int, default=8080)
@click.option("--host", default="127.0.0.1")
@click.option("--cache", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(port: int, host: str, cache: Path | None, config_path):
    """Start the HTTP service; optionally preload cache bundles."""
    import uvicorn

    config = load_config(config_path)
    store = DatasetStore(config=config, cache_dir=str(cache) if cache else None)
    if cache and (cache / META_NAME).exists():
        snapshot, _ = _load_bundle(cache)
        store.register_prebuilt(cache.name, snapshot.log, snapshot)
        click.echo(f"preloaded dataset {cache.name!r} from {cache}")
    app = create_app(store)
    uvicorn.run(app, host=host, port=port)


def run() -> None:
    try:
        main()
    except EngineError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    run()
