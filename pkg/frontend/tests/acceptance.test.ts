/** End-to-end against a live review service seeded with the benchmark graph:
 *  - confirming an edge flips it solid and its table pair joins the
 *    excluded set returned by GET /graph;
 *  - rejecting an edge and running an incremental retrain yields join
 *    paths that omit the rejected edge.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Store } from "../src/store.js";
import { edgeStyle, isExcluded } from "../src/model.js";

const PORT = 8765 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;

async function waitForService(timeoutMs = 120_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/graph`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("review service did not come up in time");
}

beforeAll(async () => {
  const here = dirname(fileURLToPath(import.meta.url));
  const script = join(here, "..", "scripts", "serve_fixture.py");
  service = spawn("python3", [script, "--port", String(PORT)], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  await waitForService();
});

afterAll(() => {
  service?.kill();
});

function freshStore(): Store {
  return new Store(new ApiClient(BASE));
}

describe("live review workflow", () => {
  it("confirm flips the edge solid and excludes its table pair", async () => {
    const store = freshStore();
    await store.load();
    const edge = store.doc!.inds.find(
      (e) => e.status === "adjudicated-accept" && e.origin === "statistical",
    )!;
    expect(edgeStyle(edge.status)).toBe("dotted");
    expect(isExcluded(edge, store.doc!.excluded_pairs)).toBe(false);

    await store.confirm(edge.id);

    const updated = store.doc!.inds.find((e) => e.id === edge.id)!;
    expect(updated.status).toBe("confirmed");
    expect(edgeStyle(updated.status)).toBe("solid");
    expect(isExcluded(updated, store.doc!.excluded_pairs)).toBe(true);
  });

  it("reject plus incremental retrain removes the edge from join paths", async () => {
    const store = freshStore();
    await store.load();
    const edge = store.doc!.inds.find(
      (e) => e.status === "adjudicated-accept" && e.origin === "statistical",
    )!;

    await store.reject(edge.id);
    await store.train("incremental");

    expect(store.trainStatus!.state).toBe("done");
    const doc = store.doc!;
    const rejected = doc.inds.find((e) => e.id === edge.id)!;
    expect(rejected.status).toBe("rejected");
    expect(edgeStyle(rejected.status)).toBe("greyed");
    for (const path of doc.join_paths) {
      for (const hop of path.hops) {
        expect(hop.ind).not.toBe(edge.id);
      }
    }
  });
});
