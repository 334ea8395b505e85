import type {
  InclusionResponse,
  LineupsResponse,
  Metric,
  PitResponse,
  QueryBody,
  QueryResponse,
  RunSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(path, init);
  const text = await res.text();
  if (!res.ok) {
    let kind = "error";
    let message = text || res.statusText;
    try {
      const body = JSON.parse(text);
      if (body?.error) {
        kind = body.error.kind;
        message = body.error.message;
      }
    } catch {
      /* not the JSON envelope; keep raw text */
    }
    throw new ApiError(res.status, kind, message);
  }
  return JSON.parse(text) as T;
}

export const api = {
  runs(signal?: AbortSignal): Promise<{ runs: RunSummary[] }> {
    return request("/runs", { signal });
  },

  lineups(run: string, metric: Metric, top: number, signal?: AbortSignal): Promise<LineupsResponse> {
    const q = new URLSearchParams({ metric, top: String(top) });
    return request(`/runs/${encodeURIComponent(run)}/lineups?${q}`, { signal });
  },

  inclusion(run: string, metric: Metric, signal?: AbortSignal): Promise<InclusionResponse> {
    const q = new URLSearchParams({ metric });
    return request(`/runs/${encodeURIComponent(run)}/inclusion?${q}`, { signal });
  },

  pit(run: string, metric: Metric, signal?: AbortSignal): Promise<PitResponse> {
    const q = new URLSearchParams({ metric });
    return request(`/runs/${encodeURIComponent(run)}/pit?${q}`, { signal });
  },

  query(run: string, body: QueryBody, signal?: AbortSignal): Promise<QueryResponse> {
    return request(`/runs/${encodeURIComponent(run)}/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  },
};

/** The what-if query for one candidate: pinned players condition (`given`),
 *  banned players re-solve; the body's `pinned` constraint list stays empty. */
export function completionQuery(
  metric: Metric,
  candidate: number,
  pinned: number[],
  banned: number[],
): QueryBody {
  return { metric, targets: [candidate], given: pinned, banned, pinned: [] };
}
