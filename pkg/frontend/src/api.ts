/** Typed client for the search service's HTTP API. The UI talks to the
 * backend through this module only. */

export interface SearchResult {
  doc_id: string;
  title: string;
  rank: number;
  jss: number;
  bm25: number;
  tfidf_sim: number;
  sem_sim: number;
  snippet: string;
}

export interface SearchResponse {
  omega: number;
  results: SearchResult[];
}

export interface DocDetail {
  doc_id: string;
  title: string;
  body: string;
  url: string | null;
  published_at: string | null;
  noun_phrases: string[];
}

export interface SearchParams {
  query: string;
  k?: number;
  /** Fusion weight override. Leave undefined to let the server estimate
   * it from the query; the field is then omitted from the request. */
  omega?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export interface RequestOptions {
  /** Origin of the service, e.g. "http://127.0.0.1:8080". Empty means
   * same-origin relative URLs. */
  base?: string;
  signal?: AbortSignal;
  fetchFn?: typeof fetch;
}

async function request(
  path: string,
  init: RequestInit,
  opts: RequestOptions,
): Promise<unknown> {
  const fetchFn = opts.fetchFn ?? globalThis.fetch;
  const response = await fetchFn(`${opts.base ?? ""}${path}`, {
    ...init,
    signal: opts.signal ?? null,
  });
  if (!response.ok) {
    let detail = `request failed with status ${response.status}`;
    try {
      const payload: unknown = await response.json();
      if (
        typeof payload === "object" &&
        payload !== null &&
        "detail" in payload &&
        typeof (payload as { detail: unknown }).detail === "string"
      ) {
        detail = (payload as { detail: string }).detail;
      }
    } catch {
      // non-JSON error body; keep the status-based message
    }
    throw new ApiError(response.status, detail);
  }
  return response.json();
}

export async function search(
  params: SearchParams,
  opts: RequestOptions = {},
): Promise<SearchResponse> {
  const body: Record<string, unknown> = { query: params.query };
  if (params.k !== undefined) {
    body.k = params.k;
  }
  if (params.omega !== undefined) {
    body.omega = params.omega;
  }
  const payload = await request(
    "/api/search",
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    },
    opts,
  );
  return payload as SearchResponse;
}

export async function fetchDoc(
  docId: string,
  opts: RequestOptions = {},
): Promise<DocDetail> {
  const payload = await request(
    `/api/doc/${encodeURIComponent(docId)}`,
    { method: "GET" },
    opts,
  );
  return payload as DocDetail;
}
