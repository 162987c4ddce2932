import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function mockFetch(handler: (url: string, init?: RequestInit) => Response): {
  fetch: FetchLike;
  calls: Call[];
} {
  const calls: Call[] = [];
  const fetch: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return handler(url, init);
  };
  return { fetch, calls };
}

const json = (body: unknown, status = 200) =>
  new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });

describe("ApiClient", () => {
  it("gets commits from the expected path", async () => {
    const { fetch, calls } = mockFetch(() => json([{ commit_id: "a", records: 1, total_exec_time_ms: 2 }]));
    const client = new ApiClient("http://x", fetch);
    const commits = await client.commits();
    expect(calls[0].url).toBe("http://x/api/commits");
    expect(commits[0].commit_id).toBe("a");
  });

  it("url-encodes commit ids in query params", async () => {
    const { fetch, calls } = mockFetch(() => json({ commit_id: "a b", records: [] }));
    await new ApiClient("", fetch).profiles("a b");
    expect(calls[0].url).toBe("/api/profiles?commit=a%20b");
  });

  it("posts cluster requests as JSON", async () => {
    const { fetch, calls } = mockFetch(() =>
      json({ algorithm: "kmeans", params: {}, features: [], seed: 0, clusters: [], noise: 0, medoids: {} }),
    );
    await new ApiClient("", fetch).cluster({ commit: "base", algo: "kmeans", k: 2 });
    expect(calls[0].url).toBe("/api/cluster");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ commit: "base", algo: "kmeans", k: 2 });
  });

  it("turns error envelopes into ApiError", async () => {
    const { fetch } = mockFetch(() => json({ error: "UnknownCommit", detail: "nope" }, 404));
    const err = await new ApiClient("", fetch).commits().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.body.error).toBe("UnknownCommit");
    expect(err.message).toContain("UnknownCommit");
  });

  it("survives non-JSON error bodies", async () => {
    const { fetch } = mockFetch(() => new Response("boom", { status: 500, statusText: "oops" }));
    const err = await new ApiClient("", fetch).commits().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.body.error).toBe("HTTPError");
  });
});
