import { describe, expect, it } from "vitest";

import type { ApiClient, GraphDoc } from "../src/api.js";
import { ApiError } from "../src/api.js";
import { Store } from "../src/store.js";
import { graphDoc, ind } from "./fixtures.js";

const EDGE = "orders.cust_id->customers.id";

interface FakeApiOptions {
  docs: GraphDoc[]; // successive /graph responses; last one repeats
  confirmError?: ApiError;
  graphError?: boolean;
}

function fakeApi(options: FakeApiOptions): ApiClient {
  let i = 0;
  return {
    graph: async () => {
      if (options.graphError) throw new TypeError("fetch failed");
      const doc = options.docs[Math.min(i, options.docs.length - 1)]!;
      i += 1;
      return structuredClone(doc);
    },
    confirm: async () => {
      if (options.confirmError) throw options.confirmError;
      return {};
    },
    reject: async () => ({}),
    overrideJoin: async () => ({}),
    defineComposite: async () => ({}),
    train: async () => ({}),
    trainStatus: async () => ({
      state: "done",
      mode: "full",
      error: null,
      runs: 1,
    }),
    historyReport: async () => ({}),
  } as unknown as ApiClient;
}

describe("Store", () => {
  it("replaces local state with server truth after confirm", async () => {
    const before = graphDoc();
    const after = graphDoc({
      inds: [ind({ id: EDGE, status: "confirmed" })],
      excluded_pairs: [["customers", "orders"]],
    });
    const store = new Store(fakeApi({ docs: [before, after] }));
    await store.load();
    expect(store.doc!.inds[0]!.status).toBe("adjudicated-accept");
    await store.confirm(EDGE);
    expect(store.doc!.inds[0]!.status).toBe("confirmed");
    expect(store.doc!.excluded_pairs).toEqual([["customers", "orders"]]);
  });

  it("applies the optimistic flip before the server answers", async () => {
    const store = new Store(fakeApi({ docs: [graphDoc()] }));
    await store.load();
    let observed: string | null = null;
    store.subscribe(() => {
      if (observed === null) observed = store.doc!.inds[0]!.status;
    });
    await store.confirm(EDGE);
    expect(observed).toBe("confirmed");
  });

  it("reverts the optimistic flip and surfaces the server error", async () => {
    const store = new Store(
      fakeApi({
        docs: [graphDoc()],
        confirmError: new ApiError(404, "unknown IND id"),
      }),
    );
    await store.load();
    await store.confirm(EDGE);
    expect(store.doc!.inds[0]!.status).toBe("adjudicated-accept");
    expect(store.message).toBe("unknown IND id");
  });

  it("defers to a concurrent decision from another session", async () => {
    // the reconciling fetch says another reviewer already rejected the edge
    const after = graphDoc({ inds: [ind({ id: EDGE, status: "rejected" })] });
    const store = new Store(fakeApi({ docs: [graphDoc(), after] }));
    await store.load();
    await store.confirm(EDGE);
    expect(store.doc!.inds[0]!.status).toBe("rejected");
  });

  it("keeps the cached view and flags offline when the service drops", async () => {
    const api = fakeApi({ docs: [graphDoc()] });
    const store = new Store(api);
    await store.load();
    expect(store.offline).toBe(false);
    (api as { graph: () => Promise<GraphDoc> }).graph = async () => {
      throw new TypeError("fetch failed");
    };
    await store.load();
    expect(store.offline).toBe(true);
    expect(store.doc).not.toBeNull(); // cached view survives
  });

  it("polls training status to completion and reloads", async () => {
    const store = new Store(fakeApi({ docs: [graphDoc()] }));
    await store.train("full");
    expect(store.trainStatus!.state).toBe("done");
    expect(store.doc).not.toBeNull(); // reloaded after training
  });
});
