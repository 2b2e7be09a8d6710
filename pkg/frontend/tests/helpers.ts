// Test scaffolding: a jsdom page with the console's mount points and a
// scripted fetch that records every request it serves.

import { JSDOM } from "jsdom";

import type { OODRecord, QueryResponse } from "../src/api.js";

export function makePage(): Document {
  const dom = new JSDOM(`<!doctype html><html><body>
    <input id="query-input">
    <button id="query-button">Ask</button>
    <div id="result-mount"></div>
    <div id="history-mount"></div>
    <input id="ood-search">
    <button id="ood-refresh">Refresh</button>
    <div id="ood-mount"></div>
  </body></html>`);
  return dom.window.document;
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface MockRoute {
  status?: number;
  body: unknown;
}

export class MockService {
  requests: RecordedRequest[] = [];

  constructor(private routes: Record<string, MockRoute | (() => MockRoute)>) {}

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    this.requests.push({
      url: path,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const route = this.routes[`${method} ${path}`];
    if (!route) {
      return new Response(JSON.stringify({ detail: "no such route" }), { status: 404 });
    }
    const result = typeof route === "function" ? route() : route;
    return new Response(JSON.stringify(result.body), {
      status: result.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };

  ofPath(path: string): RecordedRequest[] {
    return this.requests.filter((r) => r.url === path);
  }
}

export function qaResponse(overrides: Partial<QueryResponse> = {}): QueryResponse {
  return {
    schema_version: 1,
    query_id: "q-001",
    route: "qa",
    gate_confidence: 0.93,
    intent: { label: "card-activation", confidence: 0.88 },
    contexts: [
      {
        passage_id: "kb1",
        text: "Activate the card in the mobile app.",
        retriever_score: 0.71,
        reranker_score: 0.94,
        rank: 1,
      },
      {
        passage_id: "kb2",
        text: "Card activation requires the card number.",
        retriever_score: 0.64,
        reranker_score: 0.81,
        rank: 2,
      },
      {
        passage_id: "kb3",
        text: "Visit a branch to activate in person.",
        retriever_score: 0.58,
        reranker_score: 0.63,
        rank: 3,
      },
    ],
    draft_response: "You can activate your card in the mobile app.",
    ood_keywords: null,
    latency_ms: { gate: 1.2, intent: 0.9, retrieve: 2.1, rerank: 3.4, generate: 8.8 },
    ...overrides,
  };
}

export function oodResponse(): QueryResponse {
  return qaResponse({
    query_id: "q-002",
    route: "ood",
    intent: { label: "card-activation", confidence: 0.31 },
    contexts: [],
    draft_response: null,
    ood_keywords: [
      ["crypto wallet", 0.82],
      ["staking", 0.74],
    ],
  });
}

export function oodRecords(): OODRecord[] {
  return [
    {
      record_id: "ood-aaa",
      keywords: ["crypto wallet", "staking"],
      example_query: "crypto wallet staking rewards",
      count: 2,
      first_seen: "2026-08-01T10:00:00Z",
      last_seen: "2026-08-02T10:00:00Z",
    },
    {
      record_id: "ood-bbb",
      keywords: ["metaverse land"],
      example_query: "buying metaverse land",
      count: 5,
      first_seen: "2026-08-01T09:00:00Z",
      last_seen: "2026-08-03T12:00:00Z",
    },
  ];
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
