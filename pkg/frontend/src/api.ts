/** Thin typed client for the labelling service. All protocol state comes
 * from these responses; the UI never derives phases or triggers itself. */

import type {
  BatchResponse,
  CreateSessionRequest,
  CreateSessionResponse,
  MetricsResponse,
  SessionStatusResponse,
  SubmitLabelsResponse,
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

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof payload === "object" && payload !== null && "detail" in payload
          ? JSON.stringify((payload as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  createSession(body: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", body);
  }

  sessionStatus(sessionId: string): Promise<SessionStatusResponse> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  submitLabels(sessionId: string, labels: Record<string, string>): Promise<SubmitLabelsResponse> {
    return this.request("POST", `/sessions/${sessionId}/labels`, { labels });
  }

  nextBatch(sessionId: string): Promise<BatchResponse> {
    return this.request("GET", `/sessions/${sessionId}/batch`);
  }

  metrics(sessionId: string): Promise<MetricsResponse> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }

  addClass(sessionId: string, classLabel: string): Promise<{ classes: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/classes`, { class_label: classLabel });
  }
}
