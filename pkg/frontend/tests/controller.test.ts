import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AppController } from "../src/controller.js";
import { MIN_CLUSTER_PX, OVERVIEW_CANVAS_PX } from "../src/views.js";
import {
  MockServer,
  N_UNIQUE,
  RECOMMENDED,
  SHARES_K4,
  SILHOUETTE,
  UNIQUE_FREQS,
} from "./mockApi.js";

let server: MockServer;
let controller: AppController;

beforeEach(() => {
  server = new MockServer();
  controller = new AppController(new ApiClient("", server.fetch), "demo");
});

describe("slider walkthrough", () => {
  it("k 200 -> 4 re-renders the overview with 4 clusters", async () => {
    await controller.load(200, 0.6);
    expect(controller.renderModel().overview?.clusters).toHaveLength(200);

    await controller.setK(4);
    const model = controller.renderModel();
    expect(model.overview?.clusters).toHaveLength(4);
    expect(server.lastCall("/datasets/demo/overview")?.params.get("k")).toBe("4");
    // the tallest cluster is the 34.9% one
    const heights = model.overview!.clusters.map((c) => c.heightPx);
    expect(Math.max(...heights)).toBe(heights[0]);
  });

  it("threshold -> 0 renders every cluster at full detail", async () => {
    await controller.load(4, 0.6);
    const before = controller.renderModel();
    expect(
      before.overview!.clusters.some((c) => c.mergedColumns.some(Boolean)),
    ).toBe(true);

    await controller.setInformationThreshold(0);
    const after = controller.renderModel();
    expect(server.lastCall("/datasets/demo/overview")?.params.get("itau")).toBe("0");
    for (const cluster of after.overview!.clusters) {
      expect(cluster.mergedColumns.every((m) => !m)).toBe(true);
      for (const row of cluster.rows) {
        for (const cell of row.cells) {
          expect(cell.bars.length <= 1).toBe(true);
        }
      }
    }
  });

  it("setting the same value twice does not refetch", async () => {
    await controller.load(4, 0.6);
    const count = server.countCalls("/datasets/demo/overview");
    await controller.setK(4);
    await controller.setInformationThreshold(0.6);
    expect(server.countCalls("/datasets/demo/overview")).toBe(count);
  });

  it("slider bounds mirror the server-reported N and [0, 1]", async () => {
    await controller.load(4, 0.6);
    const sliders = controller.renderModel().overview!.sliders;
    expect(sliders.kMax).toBe(N_UNIQUE);
    expect(sliders.kMin).toBe(1);
    expect(sliders.itauMin).toBe(0);
    expect(sliders.itauMax).toBe(1);
    expect(sliders.itauStep).toBe(0.05);
    expect(sliders.recommended).toEqual(RECOMMENDED);
    expect(sliders.currentIsRecommended).toBe(true); // k=4 is recommended
  });

  it("server errors surface inline without losing the current view", async () => {
    await controller.load(4, 0.6);
    server.failNext = { status: 400, code: "KOutOfRange" };
    await controller.setK(9999);
    const model = controller.renderModel();
    expect(model.state.notice).toContain("KOutOfRange");
    expect(model.overview?.clusters).toHaveLength(4); // previous payload kept
  });

  it("a superseded overview request is dropped", async () => {
    await controller.load(4, 0.6);
    server.delays.set("GET /datasets/demo/overview?k=6&itau=0.6&order=similarity", 40);
    const slow = controller.setK(6);
    const fast = controller.setK(2);
    await Promise.all([slow, fast]);
    expect(controller.renderModel().overview?.clusters).toHaveLength(2);
  });
});

describe("drill-down coordination", () => {
  it("cluster -> unique sequences -> individual records", async () => {
    await controller.load(4, 0.6);
    await controller.selectCluster(1000);
    let model = controller.renderModel();
    expect(model.unique?.nodeId).toBe(1000);
    expect(model.unique?.rows.map((r) => r.frequency)).toEqual(UNIQUE_FREQS);
    expect(model.gantt).toBeNull();

    await controller.selectUnique(9, ["age", "symptom"]);
    model = controller.renderModel();
    expect(model.gantt?.uid).toBe(9);
    expect(model.gantt?.rows).toHaveLength(2);
    expect(model.gantt?.rows[0].attrs["age"]).toBe(34);
    // bars carry server-provided timing, positioned relative to row start
    expect(model.gantt?.rows[0].bars[0].startMs).toBe(0);
    expect(model.gantt?.rows[0].bars[1].startMs).toBe(60_000);
    expect(model.gantt?.rows[0].bars[0].durationMs).toBe(60_000);
    // one render model shows all three views consistently
    expect(model.overview?.clusters).toHaveLength(4);
    expect(model.unique?.rows).toHaveLength(3);
  });

  it("anchor alignment offsets come from the server", async () => {
    await controller.load(4, 0.6);
    await controller.alignBy(["CAL", "SCE"]);
    await controller.selectCluster(1001);
    const model = controller.renderModel();
    expect(server.lastCall("/datasets/demo/clusters/1001/unique-sequences")
      ?.params.get("anchors")).toBe("CAL,SCE");
    expect(model.unique?.rows.map((r) => r.offsetCols)).toEqual([0, 2, 0]);
    expect(model.unique?.rows[2].unanchored).toBe(true);
  });

  it("changing k clears selections of vanished clusters with a notice", async () => {
    await controller.load(4, 0.6);
    await controller.selectCluster(1003);
    expect(controller.renderModel().unique).not.toBeNull();

    await controller.setK(2); // frontier becomes [1000, 1001]
    const model = controller.renderModel();
    expect(model.state.selectedCluster).toBeNull();
    expect(model.unique).toBeNull();
    expect(model.gantt).toBeNull();
    expect(model.state.notice).toContain("selection cleared");
  });
});

describe("split", () => {
  it("splitting a cluster calls the endpoint and re-renders by frontier", async () => {
    await controller.load(4, 0.6);
    await controller.splitCluster(1001);
    expect(server.countCalls("/datasets/demo/frontier/split")).toBe(1);
    const lastOverview = server.lastCall("/datasets/demo/overview");
    expect(lastOverview?.params.get("frontier")).toBe("1000,10011,10012,1002,1003");
    expect(controller.renderModel().overview?.clusters).toHaveLength(5);
  });

  it("single-sequence clusters are guarded locally", async () => {
    await controller.load(4, 0.6);
    const model = controller.renderModel();
    const leaf = model.overview!.clusters.find((c) => c.nodeId === 1003)!;
    expect(leaf.splittable).toBe(false);

    const calls = server.countCalls("/datasets/demo/frontier/split");
    await controller.splitCluster(1003);
    expect(server.countCalls("/datasets/demo/frontier/split")).toBe(calls);
    expect(controller.renderModel().state.notice).toContain("cannot split");
  });
});

describe("attribute charts", () => {
  it("hiding a series re-scales the chart without refetching", async () => {
    await controller.load(4, 0.6);
    await controller.setChart("cluster", "age");
    const fetches = server.countCalls("/datasets/demo/aggregate");
    let chart = controller.renderModel().chart!;
    // C2's 45 in bin 0 dominates: full height
    const c2 = chart.bars[0].segments.find((s) => s.seriesId === "C2")!;
    expect(c2.heightFrac).toBeCloseTo(45 / 57, 10);

    controller.toggleSeries("C2");
    chart = controller.renderModel().chart!;
    expect(server.countCalls("/datasets/demo/aggregate")).toBe(fetches);
    expect(chart.series.find((s) => s.id === "C2")?.hidden).toBe(true);
    const visible = chart.bars[1].segments.map((s) => s.seriesId);
    expect(visible).toEqual(["C1"]);
    // re-scaled to the remaining series: C1's 30 becomes the tallest stack
    expect(chart.bars[1].segments[0].heightFrac).toBeCloseTo(1.0, 10);
  });

  it("selected-data charts partition selected vs rest", async () => {
    await controller.load(4, 0.6);
    await controller.selectCluster(1000);
    await controller.setChart("selected_data", "age");
    const chart = controller.renderModel().chart!;
    expect(chart.series.map((s) => s.id)).toEqual(["selected", "rest"]);
    const scope = server.lastCall("/datasets/demo/aggregate")?.params.get("scope");
    expect(scope).toBe("clusters:1000");
  });
});

describe("thin-client rule", () => {
  it("every displayed number traces to a payload field", async () => {
    await controller.load(4, 0.6);
    const model = controller.renderModel();
    const overview = model.overview!;
    // shares and counts are deliberately inconsistent in the mock; the model
    // must reproduce both verbatim rather than derive one from the other
    overview.clusters.forEach((cluster, i) => {
      expect(cluster.recordShare).toBe(SHARES_K4[i]);
      expect(cluster.recordCount).toBe(Math.round(SHARES_K4[i] * 1000));
      expect(cluster.heightPx).toBe(
        Math.max(MIN_CLUSTER_PX, Math.round(SHARES_K4[i] * OVERVIEW_CANVAS_PX)),
      );
    });
    expect(overview.sliders.currentSilhouette).toBe(SILHOUETTE);
    expect(overview.sliders.recommended).toEqual(RECOMMENDED);

    await controller.selectCluster(1000);
    const uniqueRows = controller.renderModel().unique!.rows;
    expect(uniqueRows.map((r) => r.frequency)).toEqual(UNIQUE_FREQS);

    await controller.setChart("cluster", "age");
    const chart = controller.renderModel().chart!;
    expect(chart.bars.map((b) => b.total)).toEqual([12 + 45, 30 + 7]);
  });
});
