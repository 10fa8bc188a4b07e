/** DOM rendering: SVG graph plus side panel. Thin layer over the models. */

import type { Store } from "./store.js";
import {
  buildGraphModel,
  edgeDetails,
  trainingLabel,
  type EdgeModel,
  type GraphModel,
} from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function edgePath(
  model: GraphModel,
  edge: EdgeModel,
): { d: string; midX: number; midY: number } {
  const from = model.nodes.find((n) => n.name === edge.entry.fk[0])!;
  const to = model.nodes.find((n) => n.name === edge.entry.pk[0])!;
  // bundle edges for the same pair fan out with increasing curvature
  const offset = (edge.bundleIndex - (edge.bundleSize - 1) / 2) * 28;
  const mx = (from.x + to.x) / 2;
  const my = (from.y + to.y) / 2;
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const len = Math.hypot(dx, dy) || 1;
  const cx = mx - (dy / len) * offset;
  const cy = my + (dx / len) * offset;
  return {
    d: `M ${from.x} ${from.y} Q ${cx} ${cy} ${to.x} ${to.y}`,
    midX: cx,
    midY: cy,
  };
}

export function renderGraph(container: HTMLElement, store: Store): void {
  container.textContent = "";
  if (!store.doc) {
    container.append(el("p", "empty", "loading..."));
    return;
  }
  const model = buildGraphModel(store.doc);
  if (model.empty) {
    container.append(
      el("p", "empty", "no joins inferred yet — run training to populate the graph"),
    );
    return;
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 900 600");
  svg.classList.add("graph");

  for (const edge of model.edges) {
    const { d } = edgePath(model, edge);
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", d);
    path.classList.add("edge", `edge-${edge.style}`);
    if (edge.excluded) path.classList.add("edge-excluded");
    if (edge.entry.id === store.selectedEdge) path.classList.add("edge-selected");
    path.dataset.ind = edge.entry.id;
    path.addEventListener("click", () => store.select(edge.entry.id));
    svg.append(path);
  }
  for (const node of model.nodes) {
    const g = document.createElementNS(SVG_NS, "g");
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "26");
    circle.classList.add("node");
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y - 32));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.name;
    const key = document.createElementNS(SVG_NS, "text");
    key.setAttribute("x", String(node.x));
    key.setAttribute("y", String(node.y + 4));
    key.setAttribute("text-anchor", "middle");
    key.classList.add("key-label");
    key.textContent = node.keyLabel;
    g.append(circle, label, key);
    svg.append(g);
  }
  container.append(svg);
}

export function renderDetails(container: HTMLElement, store: Store): void {
  container.textContent = "";
  const doc = store.doc;
  const selected = store.selectedEdge
    ? doc?.inds.find((e) => e.id === store.selectedEdge)
    : undefined;
  if (!doc || !selected) {
    container.append(el("p", "empty", "click an edge to see its details"));
    return;
  }
  container.append(el("h3", undefined, selected.id));
  if (selected.multi_edge || selected.default_edge) {
    const siblings = doc.inds.filter(
      (e) =>
        e.id !== selected.id &&
        [e.fk[0], e.pk[0]].sort().join("|") ===
          [selected.fk[0], selected.pk[0]].sort().join("|"),
    );
    if (siblings.length) {
      const chooser = el("p", "chooser", "other joins for this pair: ");
      for (const s of siblings) {
        const link = el("a", undefined, s.id);
        link.href = "#";
        link.addEventListener("click", (ev) => {
          ev.preventDefault();
          store.select(s.id);
        });
        chooser.append(link, " ");
      }
      container.append(chooser);
    }
  }
  const table = el("table", "details");
  for (const row of edgeDetails(selected)) {
    const tr = el("tr");
    tr.append(el("td", "label", row.label), el("td", undefined, row.value));
    table.append(tr);
  }
  container.append(table);

  const actions = el("div", "actions");
  const confirm = el("button", "confirm", "confirm");
  confirm.addEventListener("click", () => void store.confirm(selected.id));
  const reject = el("button", "reject", "reject");
  reject.addEventListener("click", () => void store.reject(selected.id));
  actions.append(confirm, reject);
  container.append(actions);
}

export function renderBanner(container: HTMLElement, store: Store): void {
  container.textContent = "";
  if (store.offline) {
    const banner = el(
      "div",
      "banner offline",
      "service unreachable — showing cached view. ",
    );
    const retry = el("button", undefined, "retry");
    retry.addEventListener("click", () => void store.load());
    banner.append(retry);
    container.append(banner);
  } else if (store.message) {
    container.append(el("div", "banner error", store.message));
  }
}

export function renderTraining(container: HTMLElement, store: Store): void {
  container.textContent = "";
  const status = store.trainStatus;
  container.append(
    el(
      "span",
      "train-state",
      status ? trainingLabel(status.state, status.mode) : "idle",
    ),
  );
  for (const mode of ["incremental", "full"] as const) {
    const button = el("button", undefined, `retrain (${mode})`);
    button.addEventListener("click", () => void store.train(mode));
    container.append(button);
  }
}
