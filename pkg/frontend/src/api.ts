// Typed client for the assist service's v1 HTTP API. The console talks to
// the server exclusively through this module; the only mutating call is
// sendFeedback.

export type Route = "general" | "ood" | "qa";
export type Verdict = "approve" | "edit" | "reject";

export interface IntentInfo {
  label: string;
  confidence: number;
}

export interface ContextHit {
  passage_id: string;
  text: string;
  retriever_score: number;
  reranker_score: number | null;
  rank?: number;
}

export interface QueryResponse {
  schema_version: number;
  query_id: string;
  route: Route;
  gate_confidence?: number | null;
  intent: IntentInfo | null;
  contexts: ContextHit[];
  draft_response: string | null;
  ood_keywords: [string, number][] | null;
  latency_ms: Record<string, number>;
}

export interface FeedbackRequest {
  query_id: string;
  verdict: Verdict;
  edited_text?: string;
  agent_id?: string;
}

export interface FeedbackAck {
  feedback_id: string;
}

export interface OODRecord {
  record_id: string;
  keywords: string[];
  example_query: string;
  count: number;
  first_seen: string;
  last_seen: string;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly stage?: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.url(path), init);
    } catch (err) {
      throw new ServiceError(0, `service unreachable: ${(err as Error).message}`);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body?.detail === "string" ? body.detail : `HTTP ${response.status}`;
      throw new ServiceError(response.status, detail, body?.stage);
    }
    return body as T;
  }

  query(queryText: string, sessionId?: string): Promise<QueryResponse> {
    return this.request<QueryResponse>("/v1/query", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ query_text: queryText, session_id: sessionId ?? null }),
    });
  }

  sendFeedback(request: FeedbackRequest): Promise<FeedbackAck> {
    return this.request<FeedbackAck>("/v1/feedback", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  oodIntents(): Promise<OODRecord[]> {
    return this.request<OODRecord[]>("/v1/ood-intents");
  }

  health(): Promise<{ status: string }> {
    return this.request<{ status: string }>("/v1/health");
  }
}
