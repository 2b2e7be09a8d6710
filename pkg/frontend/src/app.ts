// Console wiring: query form, result rendering, feedback submission with a
// per-result idempotence gate, stale-response suppression, and the OOD
// dashboard. The page shell only needs the element ids referenced in
// bootstrap().

import { ApiClient, ServiceError } from "./api.js";
import type { QueryResponse } from "./api.js";
import {
  ConsoleSession,
  DraftState,
  FeedbackGate,
  RequestSequencer,
  buildFeedback,
  isDirty,
  makeDraft,
} from "./state.js";
import {
  renderEmptyState,
  renderErrorBanner,
  renderHistory,
  renderOodTable,
  renderResult,
} from "./render.js";

export interface ConsoleApp {
  submitQuery(text: string): Promise<void>;
  refreshOod(): Promise<void>;
  readonly session: ConsoleSession;
}

export function bootstrap(doc: Document, api: ApiClient): ConsoleApp {
  const queryInput = doc.getElementById("query-input") as HTMLInputElement;
  const queryButton = doc.getElementById("query-button") as HTMLButtonElement;
  const resultMount = doc.getElementById("result-mount") as HTMLElement;
  const historyMount = doc.getElementById("history-mount") as HTMLElement;
  const oodMount = doc.getElementById("ood-mount") as HTMLElement;
  const oodSearch = doc.getElementById("ood-search") as HTMLInputElement;
  const oodRefresh = doc.getElementById("ood-refresh") as HTMLButtonElement;

  const session = new ConsoleSession();
  const sequencer = new RequestSequencer();
  let oodRecords: Awaited<ReturnType<ApiClient["oodIntents"]>> = [];

  function mount(target: HTMLElement, node: HTMLElement): void {
    target.replaceChildren(node);
  }

  function refreshHistory(): void {
    mount(historyMount, renderHistory(doc, session.history));
  }

  function showResult(response: QueryResponse): void {
    const draft: DraftState = makeDraft(response.draft_response);
    const gate = new FeedbackGate();

    async function send(action: "accept" | "reject"): Promise<void> {
      if (!gate.begin()) {
        return;
      }
      const request = buildFeedback(response.query_id, action, draft);
      try {
        const ack = await api.sendFeedback(request);
        session.recordFeedback(response.query_id, request, ack.feedback_id);
        const note = doc.createElement("div");
        note.className = "feedback-ack";
        note.textContent = `Feedback recorded (${ack.feedback_id})`;
        resultMount.querySelector(".feedback-controls")?.replaceWith(note);
        refreshHistory();
      } catch (err) {
        gate.reopen();
        resultMount.prepend(
          renderErrorBanner(doc, `Feedback failed: ${(err as Error).message}`),
        );
      }
    }

    const rendered = renderResult(doc, response, {
      onDraftInput(value) {
        draft.current = value;
        const accept = rendered.querySelector(".accept-button");
        if (accept) {
          accept.textContent = isDirty(draft) ? "Send edited draft" : "Approve draft";
        }
      },
      onAccept: () => void send("accept"),
      onReject: () => void send("reject"),
    });
    mount(resultMount, rendered);
  }

  async function submitQuery(text: string): Promise<void> {
    if (!text.trim()) {
      return;
    }
    const token = sequencer.begin();
    queryButton.disabled = true;
    try {
      const response = await api.query(text);
      if (!sequencer.isCurrent(token)) {
        return; // a newer query is in flight; drop this stale render
      }
      session.recordResponse(response);
      showResult(response);
      refreshHistory();
    } catch (err) {
      if (!sequencer.isCurrent(token)) {
        return;
      }
      const message =
        err instanceof ServiceError && err.stage
          ? `Service error (${err.status}) in stage '${err.stage}': ${err.message}`
          : `Service error: ${(err as Error).message}`;
      mount(resultMount, renderErrorBanner(doc, message));
      // the query text stays in the input for retry
    } finally {
      if (sequencer.isCurrent(token)) {
        queryButton.disabled = false;
      }
    }
  }

  function renderOod(): void {
    mount(oodMount, renderOodTable(doc, oodRecords, oodSearch.value));
  }

  async function refreshOod(): Promise<void> {
    try {
      oodRecords = await api.oodIntents();
      renderOod();
    } catch (err) {
      mount(oodMount, renderEmptyState(doc, `Could not load records: ${(err as Error).message}`));
    }
  }

  queryButton.addEventListener("click", () => void submitQuery(queryInput.value));
  queryInput.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") {
      void submitQuery(queryInput.value);
    }
  });
  oodSearch.addEventListener("input", renderOod);
  oodRefresh.addEventListener("click", () => void refreshOod());

  mount(resultMount, renderEmptyState(doc, "Submit a customer query to begin."));
  return { submitQuery, refreshOod, session };
}
