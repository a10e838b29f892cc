import { ApiClient } from "./api.js";
import { AppController } from "./controller.js";
import { mount } from "./dom.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const datasetId = params.get("dataset");
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  if (!datasetId) {
    root.textContent =
      "pass ?dataset=<id> (upload via POST /datasets or `seqlens serve --cache`)";
    return;
  }
  const api = new ApiClient("");
  const controller = new AppController(api, datasetId);
  mount(root, controller);

  // start at the server's first recommendation when there is one
  let initialK = 1;
  try {
    const recs = await api.getRecommendations(datasetId, "");
    if (recs.recommended_k.length) initialK = recs.recommended_k[0];
  } catch {
    // dataset may be too small for recommendations; fall back to k=1
  }
  await controller.load(initialK, 0.6);
}

void boot();
