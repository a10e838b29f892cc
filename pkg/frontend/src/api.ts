/** Typed client for the seqlens service. All analytics happen server-side;
 * this layer only builds URLs and decodes JSON. */

import type {
  AggregatePayload,
  ChartType,
  ClusterOrder,
  ClusterUniquesPayload,
  OverviewPayload,
  RecommendationsPayload,
  SplitPayload,
  UniqueRecordsPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface OverviewQuery {
  k?: number;
  frontier?: number[];
  itau: number;
  order: ClusterOrder;
  filtersSig: string;
}

function query(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined && value !== "") {
      parts.push(`${encodeURIComponent(key)}=${encodeURIComponent(String(value))}`);
    }
  }
  return parts.length ? `?${parts.join("&")}` : "";
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (body as { error?: string }).error ?? "UnknownError",
        (body as { message?: string }).message ?? response.statusText,
      );
    }
    return body as T;
  }

  getOverview(datasetId: string, q: OverviewQuery): Promise<OverviewPayload> {
    return this.request(
      `/datasets/${datasetId}/overview` +
        query({
          k: q.frontier ? undefined : q.k,
          frontier: q.frontier ? q.frontier.join(",") : undefined,
          itau: q.itau,
          order: q.order,
          filters_sig: q.filtersSig,
        }),
    );
  }

  getRecommendations(datasetId: string, filtersSig: string): Promise<RecommendationsPayload> {
    return this.request(
      `/datasets/${datasetId}/recommendations` + query({ filters_sig: filtersSig }),
    );
  }

  getClusterUniques(
    datasetId: string,
    nodeId: number,
    sort: string,
    filtersSig: string,
    anchors?: string[],
  ): Promise<ClusterUniquesPayload> {
    return this.request(
      `/datasets/${datasetId}/clusters/${nodeId}/unique-sequences` +
        query({
          sort,
          filters_sig: filtersSig,
          anchors: anchors && anchors.length ? anchors.join(",") : undefined,
        }),
    );
  }

  getUniqueRecords(
    datasetId: string,
    uid: number,
    attrs: string[],
    filtersSig: string,
  ): Promise<UniqueRecordsPayload> {
    return this.request(
      `/datasets/${datasetId}/unique/${uid}/records` +
        query({ attrs: attrs.join(","), filters_sig: filtersSig }),
    );
  }

  getAggregate(
    datasetId: string,
    chart: ChartType,
    attribute: string,
    opts: { k?: number; node?: number; scope?: string; filtersSig: string },
  ): Promise<AggregatePayload> {
    return this.request(
      `/datasets/${datasetId}/aggregate` +
        query({
          chart,
          attribute,
          k: opts.k,
          node: opts.node,
          scope: opts.scope,
          filters_sig: opts.filtersSig,
        }),
    );
  }

  splitFrontier(
    datasetId: string,
    frontier: number[],
    nodeId: number,
    filtersSig: string,
  ): Promise<SplitPayload> {
    return this.request(`/datasets/${datasetId}/frontier/split`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        frontier,
        node_id: nodeId,
        filters_sig: filtersSig,
      }),
    });
  }
}
