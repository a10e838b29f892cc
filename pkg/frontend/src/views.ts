/** Pure view-model builders: server payload in, drawable description out.
 *
 * Nothing here computes an analytic value; heights, widths, and positions
 * are layout arithmetic over numbers the server already provided
 * (record_share, counts, offsets, timestamps, durations).
 */

import { colorFor } from "./palette.js";
import type {
  AggregatePayload,
  AnchorAlignmentPayload,
  ClusterPayload,
  OverviewPayload,
  RecordPayload,
  UniqueSequencePayload,
} from "./types.js";

export const ITAU_STEP = 0.05;
export const MIN_CLUSTER_PX = 14;
export const OVERVIEW_CANVAS_PX = 600;
// merged-cell fallbacks: ordered bars up to 24, proportion-sorted up to 60,
// a gray density block beyond that
export const BARS_ORDERED_MAX = 24;
export const BARS_SORTED_MAX = 60;

export interface CellModel {
  kind: "gap" | "event" | "bars" | "sorted-bars" | "gray";
  merged: boolean;
  /** single event: joins the identical event directly above (drawn once) */
  joinUp: boolean;
  bars: { eventId: number; color: string }[];
  mergedCount: number; // events inside the cell (gray mode shows this)
}

export interface ClusterRowModel {
  uid: number;
  frequency: number;
  cells: CellModel[];
}

export interface ClusterModel {
  nodeId: number;
  recordCount: number;
  recordShare: number;
  heightPx: number;
  minHeightApplied: boolean;
  dotted: boolean;
  splittable: boolean;
  mergedColumns: boolean[];
  rows: ClusterRowModel[];
}

export interface SliderModel {
  k: number;
  kMin: 1;
  kMax: number;
  itau: number;
  itauMin: 0;
  itauMax: 1;
  itauStep: number;
  recommended: number[];
  currentSilhouette: number | null;
  currentIsRecommended: boolean;
}

export interface OverviewModel {
  clusters: ClusterModel[];
  sliders: SliderModel;
  alphabet: string[];
  totalRecords: number;
}

function cellModel(
  cell: number[],
  merged: boolean,
  above: number[] | null,
): CellModel {
  if (cell.length === 0) {
    return { kind: "gap", merged, joinUp: false, bars: [], mergedCount: 0 };
  }
  if (cell.length === 1) {
    const joinUp =
      above !== null && above.length === 1 && above[0] === cell[0];
    return {
      kind: "event",
      merged,
      joinUp,
      bars: [{ eventId: cell[0], color: colorFor(cell[0]) }],
      mergedCount: 1,
    };
  }
  if (cell.length > BARS_SORTED_MAX) {
    return { kind: "gray", merged, joinUp: false, bars: [], mergedCount: cell.length };
  }
  const sorted = cell.length > BARS_ORDERED_MAX;
  const events = sorted ? [...cell].sort((a, b) => a - b) : cell;
  return {
    kind: sorted ? "sorted-bars" : "bars",
    merged,
    joinUp: false,
    bars: events.map((e) => ({ eventId: e, color: colorFor(e) })),
    mergedCount: cell.length,
  };
}

export function clusterModel(cluster: ClusterPayload): ClusterModel {
  const proportional = cluster.record_share * OVERVIEW_CANVAS_PX;
  const heightPx = Math.max(MIN_CLUSTER_PX, Math.round(proportional));
  const rows: ClusterRowModel[] = cluster.rows.map((row, rowIndex) => ({
    uid: row.uid,
    frequency: row.frequency,
    cells: row.cells.map((cell, col) =>
      cellModel(
        cell,
        cluster.merged_columns[col],
        rowIndex > 0 ? cluster.rows[rowIndex - 1].cells[col] : null,
      ),
    ),
  }));
  return {
    nodeId: cluster.node_id,
    recordCount: cluster.record_count,
    recordShare: cluster.record_share,
    heightPx,
    minHeightApplied: proportional < MIN_CLUSTER_PX,
    dotted: cluster.small_cluster,
    splittable: cluster.rows.length > 1,
    mergedColumns: cluster.merged_columns,
    rows,
  };
}

export function overviewModel(payload: OverviewPayload): OverviewModel {
  return {
    clusters: payload.clusters.map(clusterModel),
    sliders: {
      k: payload.k,
      kMin: 1,
      kMax: payload.n_unique,
      itau: payload.itau,
      itauMin: 0,
      itauMax: 1,
      itauStep: ITAU_STEP,
      recommended: payload.recommended_k,
      currentSilhouette: payload.silhouette,
      currentIsRecommended: payload.recommended_k.includes(payload.k),
    },
    alphabet: payload.alphabet,
    totalRecords: payload.total_records,
  };
}

// --- unique sequence view ------------------------------------------------

export interface UniqueRowModel {
  uid: number;
  frequency: number;
  offsetCols: number;
  unanchored: boolean;
  boxes: { name: string; color: string }[];
}

export interface UniqueViewModel {
  nodeId: number;
  sort: string;
  rows: UniqueRowModel[];
}

export function uniqueViewModel(
  nodeId: number,
  sort: string,
  sequences: UniqueSequencePayload[],
  anchor: AnchorAlignmentPayload | null,
): UniqueViewModel {
  return {
    nodeId,
    sort,
    rows: sequences.map((u, index) => ({
      uid: u.uid,
      frequency: u.frequency,
      offsetCols: anchor ? anchor.offsets[index] : 0,
      unanchored: anchor ? anchor.unanchored[index] : false,
      boxes: u.sequence.map((id, pos) => ({
        name: u.events[pos],
        color: colorFor(id),
      })),
    })),
  };
}

// --- individual sequence (Gantt) view ---------------------------------------

export interface GanttBarModel {
  event: string;
  startMs: number; // relative to the row's first event
  durationMs: number;
}

export interface GanttRowModel {
  recordId: string;
  bars: GanttBarModel[];
  attrs: Record<string, unknown>;
}

export interface GanttModel {
  uid: number;
  attrColumns: string[];
  rows: GanttRowModel[];
}

export function ganttModel(
  uid: number,
  records: RecordPayload[],
  attrColumns: string[],
): GanttModel {
  return {
    uid,
    attrColumns,
    rows: records.map((record) => {
      const t0 = record.events.length ? record.events[0].timestamp_ms : 0;
      return {
        recordId: record.record_id,
        bars: record.events.map((e) => ({
          event: e.event,
          startMs: e.timestamp_ms - t0,
          durationMs: e.duration_ms,
        })),
        attrs: record.attributes,
      };
    }),
  };
}

// --- attribute analysis charts ---------------------------------------------

export interface ChartSegmentModel {
  seriesId: string;
  count: number;
  color: string;
  heightFrac: number; // of the tallest visible stack
}

export interface ChartBarModel {
  bin: string;
  total: number;
  segments: ChartSegmentModel[];
}

export interface ChartModel {
  attribute: string;
  chartType: string;
  series: { id: string; color: string; hidden: boolean }[];
  bars: ChartBarModel[];
}

const SELECTED_COLOR = "#d62728";
const REST_COLOR = "#bbbbbb";

function seriesColor(id: string, index: number): string {
  if (id === "selected") return SELECTED_COLOR;
  if (id === "rest") return REST_COLOR;
  return colorFor(index);
}

export function chartModel(
  payload: AggregatePayload,
  hiddenSeries: string[],
): ChartModel {
  const hidden = new Set(hiddenSeries);
  const visible = payload.series.filter((s) => !hidden.has(s.id));
  let maxStack = 0;
  payload.bins.forEach((_, binIndex) => {
    const stack = visible.reduce((sum, s) => sum + s.counts[binIndex], 0);
    maxStack = Math.max(maxStack, stack);
  });
  const bars: ChartBarModel[] = payload.bins.map((bin, binIndex) => {
    const segments = visible.map((s) => ({
      seriesId: s.id,
      count: s.counts[binIndex],
      color: seriesColor(s.id, payload.series.findIndex((p) => p.id === s.id)),
      heightFrac: maxStack > 0 ? s.counts[binIndex] / maxStack : 0,
    }));
    return {
      bin,
      total: segments.reduce((sum, seg) => sum + seg.count, 0),
      segments,
    };
  });
  return {
    attribute: payload.attribute,
    chartType: payload.chart_type,
    series: payload.series.map((s, index) => ({
      id: s.id,
      color: seriesColor(s.id, index),
      hidden: hidden.has(s.id),
    })),
    bars,
  };
}
