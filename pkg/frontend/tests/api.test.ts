import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Call {
  url: string;
  method: string;
  body: unknown;
}

function clientWith(
  status: number,
  payload: unknown,
): { client: ApiClient; calls: Call[] } {
  const calls: Call[] = [];
  const fakeFetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({
      url: String(input),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return { client: new ApiClient("http://svc", fakeFetch), calls };
}

describe("ApiClient", () => {
  it("fetches the graph with GET", async () => {
    const { client, calls } = clientWith(200, { inds: [] });
    await client.graph();
    expect(calls).toEqual([
      { url: "http://svc/graph", method: "GET", body: undefined },
    ]);
  });

  it("posts confirm and reject to the per-join endpoints", async () => {
    const { client, calls } = clientWith(200, { ok: true });
    await client.confirm("orders.cust_id->customers.id", "alex");
    await client.reject("orders.cust_id->customers.id");
    // the arrow in the id is percent-encoded; the server decodes it
    expect(calls[0]).toMatchObject({
      url: "http://svc/joins/orders.cust_id-%3Ecustomers.id/confirm",
      method: "POST",
      body: { actor: "alex" },
    });
    expect(calls[1]).toMatchObject({
      url: "http://svc/joins/orders.cust_id-%3Ecustomers.id/reject",
      method: "POST",
    });
  });

  it("posts manual joins with all four columns", async () => {
    const { client, calls } = clientWith(200, { ok: true });
    await client.overrideJoin({
      fk_table: "orders",
      fk_column: "clerk",
      pk_table: "staff",
      pk_column: "name",
    });
    expect(calls[0]).toMatchObject({
      url: "http://svc/joins",
      method: "POST",
      body: {
        fk_table: "orders",
        fk_column: "clerk",
        pk_table: "staff",
        pk_column: "name",
      },
    });
  });

  it("posts composite key definitions", async () => {
    const { client, calls } = clientWith(200, { ok: true });
    await client.defineComposite({ table: "orders", columns: ["a", "b"] });
    expect(calls[0]).toMatchObject({
      url: "http://svc/composite-keys",
      body: { table: "orders", columns: ["a", "b"] },
    });
  });

  it("passes the training mode as a query parameter", async () => {
    const { client, calls } = clientWith(200, { ok: true });
    await client.train("incremental");
    expect(calls[0]!.url).toBe("http://svc/train?mode=incremental");
  });

  it("raises ApiError with the server detail on failure", async () => {
    const { client } = clientWith(404, { detail: "unknown IND id 'x'" });
    const err = await client.confirm("x").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).detail).toBe("unknown IND id 'x'");
  });
});
