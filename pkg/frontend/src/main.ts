/** Entry point: wires the store to the static page. */

import { ApiClient } from "./api.js";
import { Store } from "./store.js";
import { renderBanner, renderDetails, renderGraph, renderTraining } from "./view.js";

function required(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

export function start(baseUrl: string = ""): Store {
  const store = new Store(new ApiClient(baseUrl));
  const graph = required("graph");
  const details = required("details");
  const banner = required("banner");
  const training = required("training");

  store.subscribe(() => {
    renderBanner(banner, store);
    renderGraph(graph, store);
    renderDetails(details, store);
    renderTraining(training, store);
  });

  const overrideForm = required("override-form") as HTMLFormElement;
  overrideForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(overrideForm);
    void store.overrideJoin(
      String(data.get("fk_table") ?? ""),
      String(data.get("fk_column") ?? ""),
      String(data.get("pk_table") ?? ""),
      String(data.get("pk_column") ?? ""),
    );
  });

  const compositeForm = required("composite-form") as HTMLFormElement;
  compositeForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(compositeForm);
    const columns = String(data.get("columns") ?? "")
      .split(",")
      .map((c) => c.trim())
      .filter(Boolean);
    void store.defineComposite(String(data.get("table") ?? ""), columns);
  });

  void store.load();
  void store.pollTraining(1000, 1);
  return store;
}

if (typeof document !== "undefined" && document.getElementById("graph")) {
  start();
}
