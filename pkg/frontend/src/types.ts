/** Payload shapes of the seqlens HTTP API (schema version 1). */

export interface RowPayload {
  uid: number;
  frequency: number;
  cells: number[][];
}

export interface ClusterPayload {
  node_id: number;
  record_count: number;
  record_share: number;
  small_cluster: boolean;
  merged_columns: boolean[];
  column_origin: [number, number][];
  rows: RowPayload[];
}

export interface OverviewPayload {
  api_version: string;
  dataset_id: string;
  filters_sig: string;
  n_unique: number;
  total_records: number;
  k: number;
  frontier: number[];
  itau: number;
  order: string;
  silhouette: number | null;
  recommended_k: number[];
  alphabet: string[];
  clusters: ClusterPayload[];
}

export interface UniqueSequencePayload {
  uid: number;
  sequence: number[];
  events: string[];
  frequency: number;
}

export interface AnchorAlignmentPayload {
  anchors: string[];
  offsets: number[];
  unanchored: boolean[];
  inter_anchor_events: (number | null)[] | null;
}

export interface ClusterUniquesPayload {
  api_version: string;
  dataset_id: string;
  node_id: number;
  sort: string;
  unique_sequences: UniqueSequencePayload[];
  anchor_alignment: AnchorAlignmentPayload | null;
}

export interface EventPayload {
  event: string;
  timestamp_ms: number;
  duration_ms: number;
  attrs: Record<string, string>;
}

export interface RecordPayload {
  record_id: string;
  events: EventPayload[];
  attributes: Record<string, unknown>;
}

export interface UniqueRecordsPayload {
  api_version: string;
  dataset_id: string;
  uid: number;
  frequency: number;
  records: RecordPayload[];
}

export interface AggregateSeriesPayload {
  id: string;
  counts: number[];
}

export interface AggregatePayload {
  api_version: string;
  dataset_id: string;
  attribute: string;
  chart_type: string;
  bins: string[];
  series: AggregateSeriesPayload[];
}

export interface RecommendationsPayload {
  api_version: string;
  dataset_id: string;
  filters_sig: string;
  recommended_k: number[];
  curve: [number, number][];
}

export interface SplitPayload {
  api_version: string;
  dataset_id: string;
  filters_sig: string;
  frontier: number[];
}

export type ChartType = "selected_data" | "sequence" | "cluster";
export type ClusterOrder = "similarity" | "frequency";
