// Thin fetch client for the explorer service. Every method returns parsed
// JSON; non-2xx responses become ApiError carrying the status and the
// server's detail string.

import type {
  BundleDoc,
  DoIConfigDoc,
  GraphDoc,
  SessionDoc,
  TransitionDoc,
  TransitionFrameDoc,
  ViewDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface Api {
  getGraph(): Promise<GraphDoc>;
  getView(vertex: string): Promise<ViewDoc>;
  postTransition(from: string, to: string, projection?: string): Promise<TransitionDoc>;
  getFrame(transitionId: string, t: number): Promise<TransitionFrameDoc>;
  getBundle(url: string): Promise<BundleDoc>;
  getSession(): Promise<SessionDoc>;
  putDoiConfig(doc: DoIConfigDoc): Promise<unknown>;
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(base + path, init);
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: unknown };
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body, keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export function createApi(base = ""): Api {
  return {
    getGraph: () => request<GraphDoc>(base, "/api/graph"),
    getView: (vertex) =>
      request<ViewDoc>(base, `/api/view?vertex=${encodeURIComponent(vertex)}`),
    postTransition: (from, to, projection) =>
      request<TransitionDoc>(base, "/api/transition", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(
          projection ? { from, to, projection } : { from, to },
        ),
      }),
    getFrame: (transitionId, t) =>
      request<TransitionFrameDoc>(
        base,
        `/api/transition/${encodeURIComponent(transitionId)}/frame?t=${t}`,
      ),
    getBundle: (url) => request<BundleDoc>(base, url),
    getSession: () => request<SessionDoc>(base, "/api/session"),
    putDoiConfig: (doc) =>
      request(base, "/api/doi-config", {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(doc),
      }),
  };
}
