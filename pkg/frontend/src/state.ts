// Client-side state: draft editing, per-result feedback gating, stale
// response suppression, and the session history.

import type { FeedbackRequest, QueryResponse, Verdict } from "./api.js";

export interface DraftState {
  original: string;
  current: string;
}

export function makeDraft(text: string | null): DraftState {
  const value = text ?? "";
  return { original: value, current: value };
}

export function isDirty(draft: DraftState): boolean {
  return draft.current !== draft.original;
}

/** Accepting a clean draft approves it; accepting an edited draft sends the
 * exact edited text. */
export function buildFeedback(
  queryId: string,
  action: "accept" | "reject",
  draft: DraftState,
  agentId = "",
): FeedbackRequest {
  const verdict: Verdict =
    action === "reject" ? "reject" : isDirty(draft) ? "edit" : "approve";
  const request: FeedbackRequest = { query_id: queryId, verdict };
  if (verdict === "edit") {
    request.edited_text = draft.current;
  }
  if (agentId) {
    request.agent_id = agentId;
  }
  return request;
}

/** One feedback submission per displayed result: the first begin() wins,
 * everything after is ignored until reset (a new result). */
export class FeedbackGate {
  private submitted = false;

  begin(): boolean {
    if (this.submitted) {
      return false;
    }
    this.submitted = true;
    return true;
  }

  reopen(): void {
    this.submitted = false;
  }

  get closed(): boolean {
    return this.submitted;
  }
}

/** Monotone token source: a response only renders if it is still the
 * latest in-flight request when it arrives. */
export class RequestSequencer {
  private latest = 0;

  begin(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(token: number): boolean {
    return token === this.latest;
  }
}

export interface HistoryEntry {
  response: QueryResponse;
  feedback?: { request: FeedbackRequest; feedbackId: string };
  at: string;
}

export class ConsoleSession {
  readonly history: HistoryEntry[] = [];

  constructor(public baseUrl: string = "") {}

  recordResponse(response: QueryResponse): HistoryEntry {
    const entry: HistoryEntry = { response, at: new Date().toISOString() };
    this.history.push(entry);
    return entry;
  }

  recordFeedback(queryId: string, request: FeedbackRequest, feedbackId: string): void {
    for (let i = this.history.length - 1; i >= 0; i -= 1) {
      if (this.history[i].response.query_id === queryId) {
        this.history[i].feedback = { request, feedbackId };
        return;
      }
    }
  }
}

/** Case-insensitive keyword substring filter for the OOD dashboard. */
export function filterOodRecords<T extends { keywords: string[] }>(
  records: T[],
  search: string,
): T[] {
  const needle = search.trim().toLowerCase();
  if (!needle) {
    return records;
  }
  return records.filter((record) =>
    record.keywords.some((keyword) => keyword.toLowerCase().includes(needle)),
  );
}

/** Count-descending order regardless of server ordering quirks. */
export function sortOodRecords<T extends { count: number; record_id: string }>(
  records: T[],
): T[] {
  return [...records].sort(
    (a, b) => b.count - a.count || a.record_id.localeCompare(b.record_id),
  );
}
