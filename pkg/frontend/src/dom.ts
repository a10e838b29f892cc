/** Thin DOM binder: paints render models into the page. Browser-only; all
 * logic lives in controller.ts / views.ts, which are covered by tests. */

import { AppController, RenderModel } from "./controller.js";
import { GRAY } from "./palette.js";
import { CellModel, ClusterModel } from "./views.js";

const CELL_W = 18;
const ROW_H = 12;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function paintCell(cell: CellModel): HTMLElement {
  const box = el("div", `cell ${cell.kind}`);
  box.style.width = `${CELL_W}px`;
  box.style.height = `${ROW_H}px`;
  if (cell.kind === "gap" || cell.joinUp) {
    box.classList.add("blank");
    return box;
  }
  if (cell.kind === "gray") {
    box.style.background = GRAY;
    box.title = `${cell.mergedCount} merged events`;
    return box;
  }
  for (const bar of cell.bars) {
    const strip = el("div", "bar");
    strip.style.background = bar.color;
    strip.style.width = `${Math.max(1, CELL_W / cell.bars.length)}px`;
    box.appendChild(strip);
  }
  if (cell.merged) box.classList.add("merged");
  return box;
}

function paintCluster(model: ClusterModel, controller: AppController): HTMLElement {
  const wrap = el("div", "cluster");
  wrap.style.minHeight = `${model.heightPx}px`;
  if (model.dotted) wrap.style.border = "2px dotted #555";
  const head = el(
    "div",
    "cluster-head",
    `node ${model.nodeId} — ${model.recordCount} records ` +
      `(${(model.recordShare * 100).toFixed(1)}%)`,
  );
  wrap.appendChild(head);
  head.addEventListener("click", () => void controller.selectCluster(model.nodeId));
  const splitBtn = el("button", "split", "split");
  splitBtn.disabled = !model.splittable;
  splitBtn.addEventListener("click", () => void controller.splitCluster(model.nodeId));
  head.appendChild(splitBtn);
  for (const row of model.rows) {
    const rowEl = el("div", "cluster-row");
    rowEl.title = `S${row.uid} ×${row.frequency}`;
    for (const cell of row.cells) rowEl.appendChild(paintCell(cell));
    wrap.appendChild(rowEl);
  }
  return wrap;
}

export function mount(root: HTMLElement, controller: AppController): void {
  const overviewPane = el("div", "pane overview");
  const uniquePane = el("div", "pane unique");
  const ganttPane = el("div", "pane gantt");
  const chartPane = el("div", "pane charts");
  const controls = el("div", "controls");
  const notice = el("div", "notice");
  root.append(controls, notice, overviewPane, uniquePane, ganttPane, chartPane);

  controller.onRender((model: RenderModel) => {
    notice.textContent = model.state.notice ?? "";

    controls.innerHTML = "";
    if (model.overview) {
      const s = model.overview.sliders;
      const kSlider = el("input") as HTMLInputElement;
      kSlider.type = "range";
      kSlider.min = String(s.kMin);
      kSlider.max = String(s.kMax);
      kSlider.value = String(s.k);
      kSlider.addEventListener("change", () =>
        void controller.setK(Number(kSlider.value)),
      );
      const kBox = el("select") as HTMLSelectElement;
      for (const k of s.recommended) {
        const opt = el("option", undefined, `k = ${k} (recommended)`) as HTMLOptionElement;
        opt.value = String(k);
        kBox.appendChild(opt);
      }
      kBox.addEventListener("change", () => void controller.setK(Number(kBox.value)));
      const iSlider = el("input") as HTMLInputElement;
      iSlider.type = "range";
      iSlider.min = "0";
      iSlider.max = "1";
      iSlider.step = String(s.itauStep);
      iSlider.value = String(s.itau);
      iSlider.addEventListener("change", () =>
        void controller.setInformationThreshold(Number(iSlider.value)),
      );
      const label = el(
        "span",
        "quality",
        s.currentSilhouette === null
          ? `k=${s.k}`
          : `k=${s.k} z̄=${s.currentSilhouette.toFixed(3)}` +
              (s.currentIsRecommended ? " ★" : ""),
      );
      controls.append("k ", kSlider, kBox, " threshold ", iSlider, label);
    }

    overviewPane.innerHTML = "";
    if (model.overview) {
      for (const cluster of model.overview.clusters) {
        overviewPane.appendChild(paintCluster(cluster, controller));
      }
    }

    uniquePane.innerHTML = "";
    if (model.unique) {
      for (const row of model.unique.rows) {
        const rowEl = el("div", "unique-row");
        rowEl.addEventListener("click", () => void controller.selectUnique(row.uid));
        rowEl.appendChild(el("span", "uid", `S${row.uid} ×${row.frequency} `));
        rowEl.appendChild(el("span", "pad", " ".repeat(row.offsetCols * 2)));
        for (const box of row.boxes) {
          const b = el("span", "event-box", box.name);
          b.style.background = box.color;
          rowEl.appendChild(b);
        }
        if (row.unanchored) rowEl.classList.add("unanchored");
        uniquePane.appendChild(rowEl);
      }
    }

    ganttPane.innerHTML = "";
    if (model.gantt) {
      for (const row of model.gantt.rows) {
        const rowEl = el("div", "gantt-row");
        rowEl.appendChild(el("span", "rid", row.recordId));
        const lane = el("div", "lane");
        for (const bar of row.bars) {
          const b = el("span", "gantt-bar", bar.event);
          b.style.marginLeft = `${Math.min(400, bar.startMs / 60000)}px`;
          b.title = `${bar.event} +${bar.durationMs}ms`;
          lane.appendChild(b);
        }
        rowEl.appendChild(lane);
        for (const attr of model.gantt.attrColumns) {
          rowEl.appendChild(el("span", "attr", String(row.attrs[attr] ?? "")));
        }
        ganttPane.appendChild(rowEl);
      }
    }

    chartPane.innerHTML = "";
    if (model.chart) {
      const legend = el("div", "legend");
      for (const series of model.chart.series) {
        const item = el("button", "legend-item", series.id);
        item.style.borderColor = series.color;
        if (series.hidden) item.classList.add("hidden-series");
        item.addEventListener("click", () => controller.toggleSeries(series.id));
        legend.appendChild(item);
      }
      chartPane.appendChild(legend);
      const bars = el("div", "bars");
      for (const bar of model.chart.bars) {
        const barEl = el("div", "chart-bar");
        barEl.title = `${bar.bin}: ${bar.total}`;
        for (const segment of bar.segments) {
          const seg = el("div", "segment");
          seg.style.height = `${Math.round(segment.heightFrac * 120)}px`;
          seg.style.background = segment.color;
          seg.title = `${segment.seriesId}: ${segment.count}`;
          barEl.appendChild(seg);
        }
        barEl.appendChild(el("div", "bin-label", bar.bin));
        bars.appendChild(barEl);
      }
      chartPane.appendChild(bars);
    }
  });
}
