import type { GraphDoc, IndEntry } from "../src/api.js";

export function ind(partial: Partial<IndEntry> & { id: string }): IndEntry {
  const [fkPart, pkPart] = partial.id.split("->") as [string, string];
  const [fkTable, fkColumn] = fkPart.split(".") as [string, string];
  const [pkTable, pkColumn] = pkPart.split(".") as [string, string];
  return {
    fk: [fkTable, fkColumn],
    pk: [pkTable, pkColumn],
    features: {
      card_ratio: 0.5,
      mult_depend: 1,
      mult_refs: 1,
      edit_distance: 0.8,
      typical_suffix: 1,
    },
    score: 0.86,
    status: "adjudicated-accept",
    origin: "statistical",
    default_edge: true,
    multi_edge: false,
    occurrence_count: 0,
    rationale: "",
    fk_samples: ["1", "2"],
    pk_samples: ["1", "2", "3"],
    ...partial,
  };
}

export function graphDoc(overrides: Partial<GraphDoc> = {}): GraphDoc {
  return {
    version: "1",
    database: "shop",
    estimated_candidates: 12,
    pk_decisions: [
      {
        table: "orders",
        selected: "order_id",
        clear_winner: true,
        composite: null,
        pool: [],
      },
      {
        table: "customers",
        selected: "id",
        clear_winner: true,
        composite: null,
        pool: [],
      },
    ],
    inds: [ind({ id: "orders.cust_id->customers.id" })],
    join_paths: [],
    composite_keys: {},
    excluded_pairs: [],
    ...overrides,
  };
}
