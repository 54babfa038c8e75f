// Thin fetch client for the engine API. All engine mutations go through
// the documented endpoints; nothing else touches engine state.

import type {
  DocumentPayload,
  EvalPayload,
  PatientsPayload,
  RecompilePayload,
  RulesPayload,
  RunPayload,
  TracePayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** The engine answered with a non-2xx status. */
export class ApiError extends Error {
  status: number;
  detail: string;
  retryAfterSeconds: number | null;

  constructor(status: number, detail: string, retryAfterSeconds: number | null = null) {
    super(`engine returned ${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
    this.retryAfterSeconds = retryAfterSeconds;
  }
}

/** The engine could not be reached at all (network-level failure). */
export class EngineUnreachableError extends Error {
  constructor(baseUrl: string, cause: unknown) {
    super(`engine unreachable at ${baseUrl}: ${String(cause)}`);
  }
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private lastFingerprint: string | null = null;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    const impl = fetchImpl ?? (globalThis.fetch as FetchLike | undefined);
    if (!impl) {
      throw new Error("no fetch implementation available");
    }
    this.fetchImpl = impl;
  }

  /** Fingerprint of the most recently seen engine payload. */
  get fingerprint(): string | null {
    return this.lastFingerprint;
  }

  /** A view rendered under `viewFingerprint` is stale once the engine moved on. */
  isStale(viewFingerprint: string | null): boolean {
    return (
      viewFingerprint !== null &&
      this.lastFingerprint !== null &&
      viewFingerprint !== this.lastFingerprint
    );
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (cause) {
      throw new EngineUnreachableError(this.baseUrl, cause);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      const retryHeader = response.headers.get("Retry-After");
      const retryAfter = retryHeader === null ? null : Number(retryHeader);
      throw new ApiError(response.status, detail, Number.isNaN(retryAfter!) ? null : retryAfter);
    }
    const payload = (await response.json()) as T & { fingerprint?: string };
    if (typeof payload.fingerprint === "string") {
      this.lastFingerprint = payload.fingerprint;
    }
    return payload;
  }

  listPatients(): Promise<PatientsPayload> {
    return this.request("/api/patients");
  }

  getDocument(docId: string): Promise<DocumentPayload> {
    return this.request(`/api/documents/${encodeURIComponent(docId)}`);
  }

  runDocument(docId: string): Promise<RunPayload> {
    return this.request(`/api/run/${encodeURIComponent(docId)}`, { method: "POST" });
  }

  getTrace(docId: string): Promise<{ trace: TracePayload; fingerprint: string }> {
    return this.request(`/api/trace/${encodeURIComponent(docId)}`);
  }

  getDecisions(patientId: string): Promise<{ decisions: RunPayload["decisions"]; fingerprint: string }> {
    return this.request(`/api/decisions/${encodeURIComponent(patientId)}`);
  }

  getRules(): Promise<RulesPayload> {
    return this.request("/api/rules");
  }

  putRuleTable(kind: string, content: string): Promise<{ written: string; fingerprint: string }> {
    return this.request(`/api/rules/${encodeURIComponent(kind)}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ content }),
    });
  }

  recompile(): Promise<RecompilePayload> {
    return this.request("/api/recompile", { method: "POST" });
  }

  evaluate(goldDir?: string): Promise<EvalPayload> {
    const query = goldDir ? `?gold_dir=${encodeURIComponent(goldDir)}` : "";
    return this.request(`/api/eval${query}`);
  }
}
