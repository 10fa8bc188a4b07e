/** UI state container: optimistic updates reconciled against server truth.
 *
 * The server is authoritative. Any action flow is: optionally flip the
 * local copy so the click feels instant, POST, then re-fetch /graph and
 * replace local state wholesale with the server's view. On failure the
 * local flip is reverted and the error surfaced. If the service is
 * unreachable, the last fetched document stays visible read-only.
 */

import type { ApiClient, GraphDoc, TrainStatus } from "./api.js";
import { ApiError } from "./api.js";

export type Listener = () => void;

export class Store {
  doc: GraphDoc | null = null;
  offline = false;
  message: string | null = null;
  trainStatus: TrainStatus | null = null;
  selectedEdge: string | null = null;
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  async load(): Promise<void> {
    try {
      this.doc = await this.api.graph();
      this.offline = false;
    } catch (err) {
      // keep the cached document, flag the banner
      this.offline = true;
      this.message = err instanceof Error ? err.message : String(err);
    }
    this.notify();
  }

  select(indId: string | null): void {
    this.selectedEdge = indId;
    this.notify();
  }

  private setLocalStatus(indId: string, status: string): string | null {
    if (!this.doc) return null;
    const entry = this.doc.inds.find((e) => e.id === indId);
    if (!entry) return null;
    const previous = entry.status;
    entry.status = status;
    this.notify();
    return previous;
  }

  private async decide(
    indId: string,
    action: "confirm" | "reject",
  ): Promise<void> {
    const optimistic = action === "confirm" ? "confirmed" : "rejected";
    const previous = this.setLocalStatus(indId, optimistic);
    try {
      if (action === "confirm") await this.api.confirm(indId, "ui");
      else await this.api.reject(indId, "ui");
      this.message = null;
    } catch (err) {
      if (previous !== null) this.setLocalStatus(indId, previous);
      this.message =
        err instanceof ApiError ? err.detail : err instanceof Error ? err.message : String(err);
      this.notify();
      return;
    }
    await this.load(); // reconcile with server truth
  }

  confirm(indId: string): Promise<void> {
    return this.decide(indId, "confirm");
  }

  reject(indId: string): Promise<void> {
    return this.decide(indId, "reject");
  }

  async overrideJoin(
    fkTable: string,
    fkColumn: string,
    pkTable: string,
    pkColumn: string,
  ): Promise<void> {
    try {
      await this.api.overrideJoin({
        fk_table: fkTable,
        fk_column: fkColumn,
        pk_table: pkTable,
        pk_column: pkColumn,
      });
      this.message = null;
    } catch (err) {
      this.message = err instanceof ApiError ? err.detail : String(err);
      this.notify();
      return;
    }
    await this.load();
  }

  async defineComposite(table: string, columns: string[]): Promise<void> {
    try {
      await this.api.defineComposite({ table, columns });
      this.message = null;
    } catch (err) {
      this.message = err instanceof ApiError ? err.detail : String(err);
      this.notify();
      return;
    }
    await this.load();
  }

  async train(mode: "full" | "incremental"): Promise<void> {
    try {
      await this.api.train(mode);
      this.message = null;
    } catch (err) {
      this.message = err instanceof ApiError ? err.detail : String(err);
    }
    await this.pollTraining();
  }

  async pollTraining(intervalMs = 250, maxPolls = 400): Promise<void> {
    for (let i = 0; i < maxPolls; i++) {
      try {
        this.trainStatus = await this.api.trainStatus();
      } catch {
        this.offline = true;
        this.notify();
        return;
      }
      this.notify();
      if (this.trainStatus.state !== "running") break;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
    await this.load();
  }
}
