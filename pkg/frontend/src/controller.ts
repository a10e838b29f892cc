/** Coordination between the three sequence views and the attribute charts.
 *
 * The controller owns the view state (k, threshold, order, frontier
 * overrides, selections, chart settings), talks to the server through the
 * ApiClient, and exposes one consistent render model per change. It never
 * derives an analytic value itself: everything shown comes from the last
 * payloads. At most one overview request is in flight; superseded responses
 * are dropped.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  AggregatePayload,
  ChartType,
  ClusterOrder,
  ClusterUniquesPayload,
  OverviewPayload,
  UniqueRecordsPayload,
} from "./types.js";
import {
  ChartModel,
  GanttModel,
  OverviewModel,
  UniqueViewModel,
  chartModel,
  ganttModel,
  overviewModel,
  uniqueViewModel,
} from "./views.js";

export interface ViewState {
  datasetId: string;
  filtersSig: string;
  k: number;
  itau: number;
  order: ClusterOrder;
  frontierOverride: number[] | null; // set after manual splits
  selectedCluster: number | null;
  selectedUnique: number | null;
  uniqueSort: "frequency" | "similarity";
  anchors: string[];
  ganttAttrs: string[];
  chartType: ChartType;
  chartAttribute: string | null;
  hiddenSeries: string[];
  notice: string | null;
}

export interface RenderModel {
  overview: OverviewModel | null;
  unique: UniqueViewModel | null;
  gantt: GanttModel | null;
  chart: ChartModel | null;
  state: ViewState;
}

export class AppController {
  private state: ViewState;
  private overviewPayload: OverviewPayload | null = null;
  private uniquesPayload: ClusterUniquesPayload | null = null;
  private recordsPayload: UniqueRecordsPayload | null = null;
  private chartPayload: AggregatePayload | null = null;
  private overviewToken = 0;
  private listeners: ((model: RenderModel) => void)[] = [];

  constructor(
    private api: ApiClient,
    datasetId: string,
    filtersSig = "",
  ) {
    this.state = {
      datasetId,
      filtersSig,
      k: 1,
      itau: 0.0,
      order: "similarity",
      frontierOverride: null,
      selectedCluster: null,
      selectedUnique: null,
      uniqueSort: "frequency",
      anchors: [],
      ganttAttrs: [],
      chartType: "cluster",
      chartAttribute: null,
      hiddenSeries: [],
      notice: null,
    };
  }

  onRender(listener: (model: RenderModel) => void): void {
    this.listeners.push(listener);
  }

  renderModel(): RenderModel {
    return {
      overview: this.overviewPayload ? overviewModel(this.overviewPayload) : null,
      unique:
        this.uniquesPayload && this.state.selectedCluster !== null
          ? uniqueViewModel(
              this.uniquesPayload.node_id,
              this.uniquesPayload.sort,
              this.uniquesPayload.unique_sequences,
              this.uniquesPayload.anchor_alignment,
            )
          : null,
      gantt:
        this.recordsPayload && this.state.selectedUnique !== null
          ? ganttModel(
              this.recordsPayload.uid,
              this.recordsPayload.records,
              this.state.ganttAttrs,
            )
          : null,
      chart: this.chartPayload
        ? chartModel(this.chartPayload, this.state.hiddenSeries)
        : null,
      state: { ...this.state },
    };
  }

  private emit(): void {
    const model = this.renderModel();
    for (const listener of this.listeners) {
      listener(model);
    }
  }

  getState(): ViewState {
    return { ...this.state };
  }

  /** Initial load at the server-recommended coarse view. */
  async load(k: number, itau: number): Promise<void> {
    this.state.k = k;
    this.state.itau = itau;
    await this.refetchOverview();
  }

  private async refetchOverview(): Promise<void> {
    const token = ++this.overviewToken;
    try {
      const payload = await this.api.getOverview(this.state.datasetId, {
        k: this.state.frontierOverride ? undefined : this.state.k,
        frontier: this.state.frontierOverride ?? undefined,
        itau: this.state.itau,
        order: this.state.order,
        filtersSig: this.state.filtersSig,
      });
      if (token !== this.overviewToken) {
        return; // superseded by a newer request
      }
      this.overviewPayload = payload;
      await this.reconcileSelections();
      this.emit();
    } catch (error) {
      if (token !== this.overviewToken) {
        return;
      }
      this.state.notice =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      this.emit(); // error surfaces inline; previous state stays on screen
    }
  }

  /** Selections referencing clusters that no longer exist are cleared. */
  private async reconcileSelections(): Promise<void> {
    if (!this.overviewPayload) return;
    const frontier = new Set(this.overviewPayload.frontier);
    if (
      this.state.selectedCluster !== null &&
      !frontier.has(this.state.selectedCluster)
    ) {
      this.state.selectedCluster = null;
      this.state.selectedUnique = null;
      this.uniquesPayload = null;
      this.recordsPayload = null;
      this.state.notice = "selection cleared: cluster no longer in view";
      if (this.state.chartType !== "cluster") {
        this.chartPayload = null;
      }
    }
    if (this.state.chartType === "cluster" && this.state.chartAttribute) {
      await this.refetchChart();
    }
  }

  /** Vertical level of detail. Setting the current value again is a no-op. */
  async setK(k: number): Promise<void> {
    if (k === this.state.k && this.state.frontierOverride === null) {
      return;
    }
    this.state.k = k;
    this.state.frontierOverride = null;
    this.state.notice = null;
    await this.refetchOverview();
  }

  /** Horizontal level of detail. Setting the current value again is a no-op. */
  async setInformationThreshold(itau: number): Promise<void> {
    if (itau === this.state.itau) {
      return;
    }
    this.state.itau = itau;
    this.state.notice = null;
    await this.refetchOverview();
  }

  async setOrder(order: ClusterOrder): Promise<void> {
    if (order === this.state.order) {
      return;
    }
    this.state.order = order;
    await this.refetchOverview();
  }

  /** Cluster -> unique sequence view (plus charts when they track selection). */
  async selectCluster(nodeId: number): Promise<void> {
    this.state.selectedCluster = nodeId;
    this.state.selectedUnique = null;
    this.recordsPayload = null;
    this.uniquesPayload = await this.api.getClusterUniques(
      this.state.datasetId,
      nodeId,
      this.state.uniqueSort,
      this.state.filtersSig,
      this.state.anchors,
    );
    if (this.state.chartAttribute) {
      await this.refetchChart();
    }
    this.emit();
  }

  async setUniqueSort(sort: "frequency" | "similarity"): Promise<void> {
    this.state.uniqueSort = sort;
    if (this.state.selectedCluster !== null) {
      await this.selectCluster(this.state.selectedCluster);
    }
  }

  /** Align the unique sequence view by one or two anchor events. */
  async alignBy(anchors: string[]): Promise<void> {
    this.state.anchors = anchors;
    if (this.state.selectedCluster !== null) {
      await this.selectCluster(this.state.selectedCluster);
    }
  }

  /** Unique sequence -> individual records in the Gantt view. */
  async selectUnique(uid: number, attrs?: string[]): Promise<void> {
    this.state.selectedUnique = uid;
    if (attrs) {
      this.state.ganttAttrs = attrs;
    }
    this.recordsPayload = await this.api.getUniqueRecords(
      this.state.datasetId,
      uid,
      this.state.ganttAttrs,
      this.state.filtersSig,
    );
    this.emit();
  }

  /** Break a cluster into its two children (leaves are guarded locally). */
  async splitCluster(nodeId: number): Promise<void> {
    if (!this.overviewPayload) {
      return;
    }
    const cluster = this.overviewPayload.clusters.find((c) => c.node_id === nodeId);
    if (cluster && cluster.rows.length <= 1) {
      this.state.notice = "cannot split a single-sequence cluster";
      this.emit();
      return;
    }
    const split = await this.api.splitFrontier(
      this.state.datasetId,
      this.overviewPayload.frontier,
      nodeId,
      this.state.filtersSig,
    );
    this.state.frontierOverride = split.frontier;
    await this.refetchOverview();
  }

  async setChart(chartType: ChartType, attribute: string): Promise<void> {
    this.state.chartType = chartType;
    this.state.chartAttribute = attribute;
    this.state.hiddenSeries = [];
    await this.refetchChart();
    this.emit();
  }

  private async refetchChart(): Promise<void> {
    const attribute = this.state.chartAttribute;
    if (!attribute) {
      return;
    }
    const common = { filtersSig: this.state.filtersSig };
    if (this.state.chartType === "cluster") {
      this.chartPayload = await this.api.getAggregate(
        this.state.datasetId,
        "cluster",
        attribute,
        { ...common, k: this.state.k },
      );
    } else if (this.state.chartType === "sequence") {
      if (this.state.selectedCluster === null) return;
      this.chartPayload = await this.api.getAggregate(
        this.state.datasetId,
        "sequence",
        attribute,
        { ...common, node: this.state.selectedCluster },
      );
    } else {
      if (this.state.selectedCluster === null) return;
      this.chartPayload = await this.api.getAggregate(
        this.state.datasetId,
        "selected_data",
        attribute,
        { ...common, scope: `clusters:${this.state.selectedCluster}` },
      );
    }
  }

  /** Hiding a series is purely visual: the stored payload is re-modelled. */
  toggleSeries(seriesId: string): void {
    const hidden = new Set(this.state.hiddenSeries);
    if (hidden.has(seriesId)) {
      hidden.delete(seriesId);
    } else {
      hidden.add(seriesId);
    }
    this.state.hiddenSeries = [...hidden];
    this.emit();
  }
}
