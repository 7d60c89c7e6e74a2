/** Typed fetch wrapper for the session service. */

import type {
  HierarchyStats,
  HierarchyView,
  NewSessionRequest,
  SessionView,
} from "./types";

export class ApiError extends Error {
  /** Machine error code from the service, or "network" when unreachable. */
  readonly code: string;
  readonly status: number;

  constructor(code: string, status: number, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }

  /** Network failures and server errors are worth retrying; 4xx are not. */
  get retryable(): boolean {
    return this.status === 0 || this.status >= 500;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError("network", 0, `service unreachable: ${err}`);
  }
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const code = typeof body.code === "string" ? body.code : "http_error";
    const message =
      typeof body.message === "string" ? body.message : resp.statusText;
    throw new ApiError(code, resp.status, message);
  }
  return body as T;
}

function post<T>(url: string, payload: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class Api {
  constructor(readonly baseUrl: string) {}

  health(): Promise<{ status: string }> {
    return request(`${this.baseUrl}/healthz`);
  }

  addHierarchy(
    edges: string,
    id?: string,
    weights?: Record<string, number>,
  ): Promise<HierarchyView> {
    return post(`${this.baseUrl}/hierarchies`, { edges, id, weights });
  }

  hierarchyStats(hierarchyId: string): Promise<HierarchyStats> {
    return request(
      `${this.baseUrl}/hierarchies/${encodeURIComponent(hierarchyId)}/stats`,
    );
  }

  createSession(req: NewSessionRequest): Promise<SessionView> {
    return post(`${this.baseUrl}/sessions`, req);
  }

  getSession(sessionId: string): Promise<SessionView> {
    return request(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}`,
    );
  }

  postAnswer(
    sessionId: string,
    ordinal: number,
    answer: boolean,
  ): Promise<SessionView> {
    return post(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/answers`,
      { ordinal, answer },
    );
  }
}
