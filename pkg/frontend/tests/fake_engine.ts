// In-memory stand-in for the engine HTTP API, seeded with payloads
// captured from a real serve session over the demo corpus. Stateful
// enough for the edit/recompile/re-run loop: rule tables are stored,
// recompile validates the feature table shape, and runs answer with
// the before/after capture depending on whether the Findings MI rule
// is still present.

import type { FetchLike } from "../src/api.js";
import type { RunPayload } from "../src/types.js";

import documentFixture from "./fixtures/document.json";
import patientsFixture from "./fixtures/patients.json";
import rulesFixture from "./fixtures/rules.json";
import runAfterFixture from "./fixtures/run_after.json";
import runBeforeFixture from "./fixtures/run_before.json";

const FEATURE_COLUMNS = 5;

function json(status: number, body: unknown, headers: Record<string, string> = {}): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}

export class FakeEngine {
  tables: Record<string, string> = { ...(rulesFixture.tables as Record<string, string>) };
  fingerprint: string = runBeforeFixture.fingerprint;
  down = false;
  busyRuns = 0; // answer this many run requests with 503 first
  requests: string[] = [];
  private compiles = 0;

  get docId(): string {
    return documentFixture.doc_id;
  }

  private findingsRulePresent(): boolean {
    return this.tables["feature"]
      .split("\n")
      .some((line) => line.startsWith("MI\t") && line.endsWith("Findings"));
  }

  private runPayload(): RunPayload {
    const base = this.findingsRulePresent() ? runBeforeFixture : runAfterFixture;
    const copy = JSON.parse(JSON.stringify(base)) as RunPayload;
    copy.fingerprint = this.fingerprint;
    copy.trace.fingerprint = this.fingerprint;
    return copy;
  }

  private validateFeatureTable(): string | null {
    const lines = this.tables["feature"].split("\n");
    for (let i = 0; i < lines.length; i++) {
      const stripped = lines[i].trim();
      if (stripped === "" || stripped.startsWith("#")) {
        continue;
      }
      const cells = lines[i].split("\t");
      if (cells.length !== FEATURE_COLUMNS) {
        return (
          `/srv/rules/features.tsv:${i + 1}: expected feature schema ` +
          `(conclusion, conclusion attrs|COPYALL, evidence, evidence ` +
          `attrs|ANY, section|ANY), got ${cells.length} cells`
        );
      }
    }
    return null;
  }

  fetch: FetchLike = async (url, init) => {
    if (this.down) {
      throw new TypeError("fetch failed");
    }
    const method = init?.method ?? "GET";
    const path = new URL(url).pathname;
    this.requests.push(`${method} ${path}`);

    if (method === "GET" && path === "/api/patients") {
      return json(200, { ...patientsFixture, fingerprint: this.fingerprint });
    }
    if (method === "GET" && path.startsWith("/api/documents/")) {
      const docId = decodeURIComponent(path.split("/").pop()!);
      if (docId !== this.docId) {
        return json(404, { detail: `unknown document ${docId}` });
      }
      return json(200, { ...documentFixture, fingerprint: this.fingerprint });
    }
    if (method === "POST" && path.startsWith("/api/run/")) {
      if (this.busyRuns > 0) {
        this.busyRuns -= 1;
        return json(503, { detail: "recompile in flight, retry" }, { "Retry-After": "1" });
      }
      const docId = decodeURIComponent(path.split("/").pop()!);
      if (docId !== this.docId) {
        return json(404, { detail: `unknown document ${docId}` });
      }
      return json(200, this.runPayload());
    }
    if (method === "GET" && path === "/api/rules") {
      return json(200, { tables: { ...this.tables }, fingerprint: this.fingerprint });
    }
    if (method === "PUT" && path.startsWith("/api/rules/")) {
      const kind = decodeURIComponent(path.split("/").pop()!);
      if (!(kind in this.tables)) {
        return json(404, { detail: `unknown component '${kind}'` });
      }
      const body = JSON.parse(String(init?.body)) as { content: string };
      this.tables[kind] = body.content;
      return json(200, { written: `/srv/rules/${kind}`, fingerprint: this.fingerprint });
    }
    if (method === "POST" && path === "/api/recompile") {
      const problem = this.validateFeatureTable();
      if (problem !== null) {
        return json(422, { detail: problem });
      }
      this.compiles += 1;
      this.fingerprint = `fp-recompiled-${this.compiles}`;
      return json(200, { fingerprint: this.fingerprint });
    }
    return json(404, { detail: `no route ${method} ${path}` });
  };
}
