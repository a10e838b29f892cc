"""
Driving the HTTP API
====================

The same pipeline behind an HTTP service: upload a dataset, poll the build,
fetch overviews at any (k, threshold), apply a filter (which rebuilds the
pipeline on the sub-log), drill into a cluster, and aggregate an attribute.
Uses the in-process test client; `seqlens serve` runs the same app on a
real port.
"""

import random
import time

from fastapi.testclient import TestClient

from seqlens.service import DatasetStore, create_app
from seqlens.synth import synthetic_event_log_csv

rng = random.Random(31)
events_csv, attrs_csv = synthetic_event_log_csv(250, rng, n_patterns=6, alphabet_size=8)

app = create_app(DatasetStore())
client = TestClient(app)

# upload: returns 202 + a dataset id; the tree builds in the background
resp = client.post("/datasets", files={
    "events": ("events.csv", events_csv, "text/csv"),
    "attributes": ("attributes.csv", attrs_csv, "text/csv"),
})
dataset_id = resp.json()["dataset_id"]
print("dataset:", dataset_id)

while client.get(f"/datasets/{dataset_id}/status").json()["status"] != "ready":
    time.sleep(0.05)

# recommendations come from the silhouette curve
recs = client.get(f"/datasets/{dataset_id}/recommendations").json()
print("recommended k:", recs["recommended_k"][:5])

k = recs["recommended_k"][0]
overview = client.get(
    f"/datasets/{dataset_id}/overview",
    params={"k": k, "itau": 0.6, "order": "frequency"},
).json()
print(f"\noverview at k={k}, threshold 0.6:")
for cluster in overview["clusters"]:
    print(
        f"  node {cluster['node_id']}: {cluster['record_count']} records "
        f"({cluster['record_share'] * 100:.1f}%), "
        f"{len(cluster['merged_columns'])} columns, "
        f"{sum(cluster['merged_columns'])} merged"
    )

# drill into the biggest cluster: unique sequences, then individual records
top = overview["clusters"][0]["node_id"]
uniques = client.get(
    f"/datasets/{dataset_id}/clusters/{top}/unique-sequences",
    params={"sort": "frequency"},
).json()["unique_sequences"]
print(f"\ncluster {top} holds {len(uniques)} unique sequences; top 3:")
for u in uniques[:3]:
    print(f"  S{u['uid']} x{u['frequency']}: {'-'.join(u['events'])}")

records = client.get(
    f"/datasets/{dataset_id}/unique/{uniques[0]['uid']}/records",
    params={"attrs": "age,group"},
).json()["records"]
print(f"\nS{uniques[0]['uid']} has {len(records)} individual records; first:")
first = records[0]
for event in first["events"][:4]:
    print(f"  {event['event']:<4} at {event['timestamp_ms']} (+{event['duration_ms']}ms)")
print("  attributes:", first["attributes"])

# filters rebuild the pipeline on the sub-log, cached by signature
flt = client.post(
    f"/datasets/{dataset_id}/filters",
    json={"filters": [{"kind": "event_occurrence", "op": "=", "value": "E2"}]},
).json()
sig = flt["filters_sig"]
while client.get(
    f"/datasets/{dataset_id}/status", params={"filters_sig": sig}
).json()["status"] != "ready":
    time.sleep(0.05)
filtered = client.get(
    f"/datasets/{dataset_id}/overview", params={"k": 2, "filters_sig": sig}
).json()
print(f"\nwith filter 'contains E2': {filtered['total_records']} records remain")

# attribute analysis: stacked-bar data per cluster
chart = client.get(
    f"/datasets/{dataset_id}/aggregate",
    params={"chart": "cluster", "attribute": "group", "k": k},
).json()
print("\nattribute 'group' by cluster:")
print("  bins:  ", chart["bins"])
for series in chart["series"]:
    print(f"  {series['id']:<4}", series["counts"])
