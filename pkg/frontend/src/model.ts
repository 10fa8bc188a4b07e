/** Pure projections of the server's graph document into render models.
 *
 * Nothing here recomputes scores or statuses: every number and status
 * shown in the UI is read from a field of GET /graph. The only work done
 * client-side is layout geometry and grouping for display.
 */

import type { GraphDoc, IndEntry, PkDecision } from "./api.js";

export type EdgeStyle = "solid" | "dotted" | "greyed";

/** Inferred edges are dotted, human-settled edges solid, rejected greyed. */
export function edgeStyle(status: string): EdgeStyle {
  switch (status) {
    case "confirmed":
    case "user-defined":
      return "solid";
    case "rejected":
    case "adjudicated-reject":
    case "pruned":
      return "greyed";
    default:
      // adjudicated-accept, history-derived, candidate, ...
      return "dotted";
  }
}

export function tablePair(entry: IndEntry): [string, string] {
  const pair = [entry.fk[0], entry.pk[0]].sort();
  return [pair[0]!, pair[1]!];
}

/** Whether the edge's table pair sits in the server's excluded set. */
export function isExcluded(entry: IndEntry, excludedPairs: string[][]): boolean {
  const [a, b] = tablePair(entry);
  return excludedPairs.some((p) => p[0] === a && p[1] === b);
}

export interface NodeModel {
  name: string;
  /** Server-side key annotation, verbatim from pk_decisions / composite_keys. */
  keyLabel: string;
  x: number;
  y: number;
}

export interface EdgeModel {
  entry: IndEntry;
  style: EdgeStyle;
  excluded: boolean;
  /** >1 when several INDs connect the same table pair (chooser shown). */
  bundleSize: number;
  bundleIndex: number;
}

export interface GraphModel {
  nodes: NodeModel[];
  edges: EdgeModel[];
  empty: boolean;
}

function keyLabel(decision: PkDecision | undefined, composite: string[] | undefined): string {
  if (composite && composite.length) return `(${composite.join(", ")})`;
  if (decision?.composite && decision.composite.length) {
    return `(${decision.composite.join(", ")})`;
  }
  if (decision?.selected) return decision.selected;
  return "?";
}

/** Deterministic circular layout; purely geometric. */
export function layoutNodes(
  names: string[],
  width: number,
  height: number,
): Map<string, { x: number; y: number }> {
  const sorted = [...names].sort();
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(width, height) / 2 - 60;
  const out = new Map<string, { x: number; y: number }>();
  sorted.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / Math.max(sorted.length, 1) - Math.PI / 2;
    out.set(name, {
      x: Math.round(cx + r * Math.cos(angle)),
      y: Math.round(cy + r * Math.sin(angle)),
    });
  });
  return out;
}

export function buildGraphModel(
  doc: GraphDoc,
  width = 900,
  height = 600,
): GraphModel {
  const names = new Set<string>();
  for (const d of doc.pk_decisions) names.add(d.table);
  for (const e of doc.inds) {
    names.add(e.fk[0]);
    names.add(e.pk[0]);
  }
  const positions = layoutNodes([...names], width, height);
  const decisions = new Map(doc.pk_decisions.map((d) => [d.table, d]));
  const nodes: NodeModel[] = [...positions.entries()].map(([name, pos]) => ({
    name,
    keyLabel: keyLabel(decisions.get(name), doc.composite_keys[name]),
    x: pos.x,
    y: pos.y,
  }));

  const byPair = new Map<string, IndEntry[]>();
  for (const entry of doc.inds) {
    const key = tablePair(entry).join("|");
    const group = byPair.get(key) ?? [];
    group.push(entry);
    byPair.set(key, group);
  }
  const edges: EdgeModel[] = [];
  for (const key of [...byPair.keys()].sort()) {
    const group = byPair
      .get(key)!
      .slice()
      .sort((a, b) => (a.id < b.id ? -1 : 1));
    group.forEach((entry, i) => {
      edges.push({
        entry,
        style: edgeStyle(entry.status),
        excluded: isExcluded(entry, doc.excluded_pairs),
        bundleSize: group.length,
        bundleIndex: i,
      });
    });
  }
  return { nodes, edges, empty: doc.inds.length === 0 };
}

export interface DetailRow {
  label: string;
  value: string;
}

/** Edge details panel: key/foreign-key columns, score, feature breakdown,
 * sample values, provenance — all verbatim fields of the graph document. */
export function edgeDetails(entry: IndEntry): DetailRow[] {
  const rows: DetailRow[] = [
    { label: "foreign key", value: `${entry.fk[0]}.${entry.fk[1]}` },
    { label: "primary key", value: `${entry.pk[0]}.${entry.pk[1]}` },
    { label: "status", value: entry.status },
    { label: "origin", value: entry.origin },
    { label: "score", value: String(entry.score) },
  ];
  if (entry.features) {
    for (const [name, value] of Object.entries(entry.features)) {
      rows.push({ label: `feature: ${name}`, value: String(value) });
    }
  }
  if (entry.fk_samples.length) {
    rows.push({ label: "fk samples", value: entry.fk_samples.join(", ") });
  }
  if (entry.pk_samples.length) {
    rows.push({ label: "pk samples", value: entry.pk_samples.join(", ") });
  }
  if (entry.occurrence_count > 0) {
    rows.push({ label: "seen in history", value: `${entry.occurrence_count}x` });
  }
  if (entry.rationale) {
    rows.push({ label: "rationale", value: entry.rationale });
  }
  return rows;
}

export function trainingLabel(state: string, mode: string | null): string {
  if (state === "running") return `training (${mode ?? "?"})...`;
  if (state === "error") return "training failed";
  if (state === "done") return "training done";
  return "idle";
}
