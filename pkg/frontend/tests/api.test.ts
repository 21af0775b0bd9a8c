import { describe, expect, it } from "vitest";

import { ApiError, fetchDoc, search } from "../src/api";

interface Captured {
  url: string;
  method: string | undefined;
  body: unknown;
}

function fakeFetch(
  status: number,
  payload: unknown,
): { fetchFn: typeof fetch; calls: Captured[] } {
  const calls: Captured[] = [];
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({
      url: String(input),
      method: init?.method,
      body:
        typeof init?.body === "string" ? JSON.parse(init.body) : init?.body,
    });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return { fetchFn, calls };
}

const RESPONSE = {
  omega: 0.1,
  results: [
    {
      doc_id: "d1",
      title: "عنوان",
      rank: 1,
      jss: 0.5,
      bm25: 2.25,
      tfidf_sim: 0.25,
      sem_sim: 0.75,
      snippet: "متن",
    },
  ],
};

describe("search", () => {
  it("posts the query and parses the response", async () => {
    const { fetchFn, calls } = fakeFetch(200, RESPONSE);
    const result = await search({ query: "تست", k: 5 }, { fetchFn });
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("/api/search");
    expect(calls[0].method).toBe("POST");
    expect(calls[0].body).toEqual({ query: "تست", k: 5 });
    expect(result.omega).toBe(0.1);
    expect(result.results[0].doc_id).toBe("d1");
  });

  it("omits the omega field entirely when no override is set", async () => {
    const { fetchFn, calls } = fakeFetch(200, RESPONSE);
    await search({ query: "تست", k: 10 }, { fetchFn });
    expect("omega" in (calls[0].body as Record<string, unknown>)).toBe(false);
  });

  it("sends omega when set, including zero", async () => {
    const { fetchFn, calls } = fakeFetch(200, RESPONSE);
    await search({ query: "تست", omega: 0 }, { fetchFn });
    expect((calls[0].body as Record<string, unknown>).omega).toBe(0);
  });

  it("prefixes the configured base origin", async () => {
    const { fetchFn, calls } = fakeFetch(200, RESPONSE);
    await search({ query: "تست" }, { fetchFn, base: "http://s:81" });
    expect(calls[0].url).toBe("http://s:81/api/search");
  });

  it("raises ApiError with the server detail on 422", async () => {
    const { fetchFn } = fakeFetch(422, {
      detail: "omega must be within [0, 1], got 1.5",
    });
    const error = await search({ query: "x", omega: 1 }, { fetchFn }).catch(
      (e: unknown) => e,
    );
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(422);
    expect((error as ApiError).message).toContain("omega must be within");
  });

  it("raises ApiError 503 while the engine is loading", async () => {
    const { fetchFn } = fakeFetch(503, { detail: "engine not loaded" });
    const error = await search({ query: "x" }, { fetchFn }).catch(
      (e: unknown) => e,
    );
    expect((error as ApiError).status).toBe(503);
  });

  it("falls back to a status message for non-JSON error bodies", async () => {
    const fetchFn = (async () =>
      new Response("boom", { status: 500 })) as typeof fetch;
    const error = await search({ query: "x" }, { fetchFn }).catch(
      (e: unknown) => e,
    );
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).message).toContain("500");
  });
});

describe("fetchDoc", () => {
  it("gets the document by escaped id", async () => {
    const doc = {
      doc_id: "a/b",
      title: "t",
      body: "b",
      url: null,
      published_at: null,
      noun_phrases: [],
    };
    const { fetchFn, calls } = fakeFetch(200, doc);
    const result = await fetchDoc("a/b", { fetchFn });
    expect(calls[0].url).toBe("/api/doc/a%2Fb");
    expect(calls[0].method).toBe("GET");
    expect(result.doc_id).toBe("a/b");
  });

  it("raises ApiError 404 for unknown documents", async () => {
    const { fetchFn } = fakeFetch(404, { detail: "unknown document: nope" });
    const error = await fetchDoc("nope", { fetchFn }).catch((e: unknown) => e);
    expect((error as ApiError).status).toBe(404);
  });
});
