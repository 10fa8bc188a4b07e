/** Typed client for the join review service HTTP API.
 *
 * This is the only place the UI talks to the network. Every endpoint here
 * is part of the service's documented surface; nothing is computed
 * client-side beyond formatting.
 */

export interface FeatureBreakdown {
  card_ratio: number;
  mult_depend: number;
  mult_refs: number;
  edit_distance: number;
  typical_suffix: number;
}

export interface IndEntry {
  id: string;
  fk: [string, string];
  pk: [string, string];
  features: FeatureBreakdown | null;
  score: number;
  status: string;
  origin: string;
  default_edge: boolean;
  multi_edge: boolean;
  occurrence_count: number;
  rationale: string;
  fk_samples: string[];
  pk_samples: string[];
}

export interface PoolEntry {
  column: string;
  key_score: number;
  name_distance: number;
  distinct_ratio: number;
  suffix_id: boolean;
  suffix_key: boolean;
  origin: string;
}

export interface PkDecision {
  table: string;
  selected: string | null;
  clear_winner: boolean;
  composite: string[] | null;
  pool: PoolEntry[];
}

export interface JoinHop {
  from: string;
  to: string;
  ind: string;
  score: number;
  synthetic: boolean;
}

export interface JoinPathDoc {
  root: string;
  combined_score: number;
  topo_order: string[];
  hops: JoinHop[];
}

export interface GraphDoc {
  version: string;
  database: string;
  estimated_candidates: number;
  pk_decisions: PkDecision[];
  inds: IndEntry[];
  join_paths: JoinPathDoc[];
  composite_keys: Record<string, string[]>;
  excluded_pairs: string[][];
  [extra: string]: unknown;
}

export interface TableInfo {
  name: string;
  columns: { name: string; type: string }[];
  declared_pk: string[] | null;
}

export interface TrainStatus {
  state: string;
  mode: string | null;
  error: string | null;
  runs: number;
}

export interface UserJoinBody {
  fk_table: string;
  fk_column: string;
  pk_table: string;
  pk_column: string;
  actor?: string;
}

export interface CompositeBody {
  table: string;
  columns: string[];
  actor?: string;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type Fetch = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  private async request<T>(
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  graph(): Promise<GraphDoc> {
    return this.request<GraphDoc>("/graph");
  }

  tables(): Promise<{ database: string; tables: TableInfo[] }> {
    return this.request("/tables");
  }

  confirm(indId: string, actor?: string): Promise<unknown> {
    return this.post(
      `/joins/${encodeURI(indId)}/confirm`,
      actor ? { actor } : undefined,
    );
  }

  reject(indId: string, actor?: string): Promise<unknown> {
    return this.post(
      `/joins/${encodeURI(indId)}/reject`,
      actor ? { actor } : undefined,
    );
  }

  overrideJoin(body: UserJoinBody): Promise<unknown> {
    return this.post("/joins", { actor: "ui", ...body });
  }

  defineComposite(body: CompositeBody): Promise<unknown> {
    return this.post("/composite-keys", { actor: "ui", ...body });
  }

  train(mode: "full" | "incremental"): Promise<unknown> {
    return this.post(`/train?mode=${mode}`);
  }

  trainStatus(): Promise<TrainStatus> {
    return this.request<TrainStatus>("/train/status");
  }

  historyReport(): Promise<unknown> {
    return this.request("/history-report");
  }
}
