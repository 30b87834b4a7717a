/** HTTP client for the neighbor service.
 *
 * At most one query request is in flight: submitting a new query aborts
 * the previous one, whose outcome then folds into the state as a no-op.
 */
import { NeighborPoint, NeighborsResponse } from "./types";
import { QueryResult } from "./state";

export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string, init: { signal: AbortSignal },
) => Promise<ResponseLike>;

function isNeighbor(value: unknown): value is NeighborPoint {
  const p = value as NeighborPoint;
  return typeof p === "object" && p !== null
    && typeof p.tag === "string" && typeof p.similarity === "number"
    && typeof p.x === "number" && typeof p.y === "number";
}

function parseResponse(value: unknown): NeighborsResponse | null {
  const r = value as NeighborsResponse;
  if (typeof r !== "object" || r === null) return null;
  if (typeof r.query !== "string") return null;
  if (typeof r.x !== "number" || typeof r.y !== "number") return null;
  if (!Array.isArray(r.neighbors) || !r.neighbors.every(isNeighbor)) return null;
  return r;
}

export class NeighborsClient {
  private inflight: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  /** GET /api/neighbors for a tag, cancelling any request still running. */
  async submit(tag: string): Promise<QueryResult> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const url = `${this.baseUrl}/api/neighbors?tag=${encodeURIComponent(tag)}`;
    try {
      const resp = await this.fetchFn(url, { signal: controller.signal });
      if (resp.status === 404) {
        return { kind: "unknown-hashtag" };
      }
      if (!resp.ok) {
        return { kind: "error", message: `service error ${resp.status}` };
      }
      const data = parseResponse(await resp.json());
      if (data === null) {
        return { kind: "error", message: "malformed response" };
      }
      return { kind: "ok", data };
    } catch (err) {
      if (controller.signal.aborted || (err as { name?: string }).name === "AbortError") {
        return { kind: "aborted" };
      }
      return { kind: "error", message: "network failure" };
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
    }
  }

  /** GET /api/health; true when the service reports ok. */
  async healthy(): Promise<boolean> {
    try {
      const controller = new AbortController();
      const resp = await this.fetchFn(`${this.baseUrl}/api/health`,
                                      { signal: controller.signal });
      if (!resp.ok) return false;
      const body = await resp.json() as { status?: string };
      return body !== null && body.status === "ok";
    } catch {
      return false;
    }
  }
}
