import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, EngineUnreachableError, type FetchLike } from "../src/api.js";

function jsonResponse(status: number, body: unknown, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}

describe("ApiClient", () => {
  it("records the payload fingerprint and detects stale views", async () => {
    let fp = "fp-1";
    const fetchImpl: FetchLike = async () => jsonResponse(200, { patients: [], fingerprint: fp });
    const client = new ApiClient("http://engine", fetchImpl);
    expect(client.fingerprint).toBeNull();
    expect(client.isStale("fp-0")).toBe(false);

    await client.listPatients();
    expect(client.fingerprint).toBe("fp-1");
    expect(client.isStale("fp-1")).toBe(false);

    fp = "fp-2";
    await client.listPatients();
    expect(client.isStale("fp-1")).toBe(true);
    expect(client.isStale(null)).toBe(false);
  });

  it("raises ApiError with detail and Retry-After on 503", async () => {
    const fetchImpl: FetchLike = async () =>
      jsonResponse(503, { detail: "recompile in flight, retry" }, { "Retry-After": "2" });
    const client = new ApiClient("http://engine", fetchImpl);
    const err = await client.runDocument("P01-1").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(503);
    expect(err.detail).toBe("recompile in flight, retry");
    expect(err.retryAfterSeconds).toBe(2);
  });

  it("raises ApiError without retry hint on plain errors", async () => {
    const fetchImpl: FetchLike = async () => jsonResponse(422, { detail: "bad table" });
    const client = new ApiClient("http://engine", fetchImpl);
    const err = await client.recompile().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.retryAfterSeconds).toBeNull();
  });

  it("wraps network failures as EngineUnreachableError", async () => {
    const fetchImpl: FetchLike = async () => {
      throw new TypeError("fetch failed");
    };
    const client = new ApiClient("http://engine", fetchImpl);
    const err = await client.listPatients().catch((e) => e);
    expect(err).toBeInstanceOf(EngineUnreachableError);
    expect(String(err)).toContain("http://engine");
  });

  it("sends rule table content as a JSON body", async () => {
    let seen: { url: string; init?: RequestInit } | null = null;
    const fetchImpl: FetchLike = async (url, init) => {
      seen = { url, init };
      return jsonResponse(200, { written: "/srv/rules/features.tsv", fingerprint: "fp" });
    };
    const client = new ApiClient("http://engine/", fetchImpl);
    await client.putRuleTable("feature", "a\tb\n");
    expect(seen!.url).toBe("http://engine/api/rules/feature");
    expect(seen!.init?.method).toBe("PUT");
    expect(JSON.parse(String(seen!.init?.body))).toEqual({ content: "a\tb\n" });
  });

  it("keeps the status text when the error body is not JSON", async () => {
    const fetchImpl: FetchLike = async () =>
      new Response("<html>boom</html>", { status: 500, statusText: "Internal Server Error" });
    const client = new ApiClient("http://engine", fetchImpl);
    const err = await client.listPatients().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.detail).toBe("Internal Server Error");
  });
});
