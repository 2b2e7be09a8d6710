// DOM builders. Every score, label, and text shown here comes straight from
// a service response field; nothing is fabricated client-side.

import type { ContextHit, IntentInfo, OODRecord, QueryResponse } from "./api.js";
import { filterOodRecords, sortOodRecords } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function formatScore(value: number | null | undefined): string {
  return value === null || value === undefined ? "–" : value.toFixed(4);
}

export function routeBadge(doc: Document, route: string): HTMLElement {
  return el(doc, "span", `route-badge route-${route}`, route);
}

export function renderIntent(doc: Document, intent: IntentInfo): HTMLElement {
  const panel = el(doc, "div", "intent-panel");
  panel.appendChild(el(doc, "span", "intent-label", intent.label));
  panel.appendChild(
    el(doc, "span", "intent-confidence", `confidence ${intent.confidence.toFixed(3)}`),
  );
  return panel;
}

export function renderContextCard(doc: Document, hit: ContextHit): HTMLElement {
  const card = el(doc, "div", "context-card");
  card.dataset.passageId = hit.passage_id;
  const header = el(doc, "div", "context-header");
  header.appendChild(el(doc, "span", "context-rank", `#${hit.rank ?? "?"}`));
  header.appendChild(el(doc, "span", "context-id", hit.passage_id));
  card.appendChild(header);
  card.appendChild(el(doc, "p", "context-text", hit.text));
  const scores = el(doc, "div", "context-scores");
  scores.appendChild(
    el(doc, "span", "retriever-score", `retriever ${formatScore(hit.retriever_score)}`),
  );
  scores.appendChild(
    el(doc, "span", "reranker-score", `re-ranker ${formatScore(hit.reranker_score)}`),
  );
  card.appendChild(scores);
  return card;
}

export function renderKeywords(doc: Document, keywords: [string, number][]): HTMLElement {
  const list = el(doc, "div", "keyword-chips");
  for (const [keyword, score] of keywords) {
    const chip = el(doc, "span", "keyword-chip", keyword);
    chip.title = `similarity ${score.toFixed(3)}`;
    list.appendChild(chip);
  }
  return list;
}

export function renderLatency(doc: Document, latency: Record<string, number>): HTMLElement {
  const row = el(doc, "div", "latency-row");
  for (const [stage, ms] of Object.entries(latency)) {
    row.appendChild(el(doc, "span", "latency-item", `${stage} ${ms.toFixed(1)} ms`));
  }
  return row;
}

export interface ResultHandlers {
  onDraftInput(value: string): void;
  onAccept(): void;
  onReject(): void;
}

/** Render one pipeline result: badge, intent, context cards, and (when a
 * draft exists) the editable draft plus feedback controls. */
export function renderResult(
  doc: Document,
  response: QueryResponse,
  handlers: ResultHandlers,
): HTMLElement {
  const root = el(doc, "section", "result");
  root.dataset.queryId = response.query_id;
  root.dataset.route = response.route;

  const header = el(doc, "div", "result-header");
  header.appendChild(routeBadge(doc, response.route));
  if (response.gate_confidence !== null && response.gate_confidence !== undefined) {
    header.appendChild(
      el(doc, "span", "gate-confidence", `gate ${response.gate_confidence.toFixed(3)}`),
    );
  }
  root.appendChild(header);

  if (response.intent) {
    root.appendChild(renderIntent(doc, response.intent));
  }

  if (response.route === "ood" && response.ood_keywords) {
    root.appendChild(renderKeywords(doc, response.ood_keywords));
  }

  if (response.contexts.length > 0) {
    const contexts = el(doc, "div", "context-list");
    for (const hit of response.contexts) {
      contexts.appendChild(renderContextCard(doc, hit));
    }
    root.appendChild(contexts);
  }

  if (response.draft_response !== null) {
    const editorWrap = el(doc, "div", "draft-wrap");
    const editor = el(doc, "textarea", "draft-editor");
    editor.value = response.draft_response;
    editor.addEventListener("input", () => handlers.onDraftInput(editor.value));
    editorWrap.appendChild(editor);

    const controls = el(doc, "div", "feedback-controls");
    const accept = el(doc, "button", "accept-button", "Approve draft");
    accept.addEventListener("click", () => handlers.onAccept());
    const reject = el(doc, "button", "reject-button", "Reject");
    reject.addEventListener("click", () => handlers.onReject());
    controls.appendChild(accept);
    controls.appendChild(reject);
    editorWrap.appendChild(controls);
    root.appendChild(editorWrap);
  }

  root.appendChild(renderLatency(doc, response.latency_ms));
  return root;
}

export function renderErrorBanner(doc: Document, message: string): HTMLElement {
  return el(doc, "div", "error-banner", message);
}

export function renderEmptyState(doc: Document, message: string): HTMLElement {
  return el(doc, "div", "empty-state", message);
}

/** OOD dashboard table: count-descending, filtered by keyword substring. */
export function renderOodTable(
  doc: Document,
  records: OODRecord[],
  search = "",
): HTMLElement {
  const visible = filterOodRecords(sortOodRecords(records), search);
  if (visible.length === 0) {
    return renderEmptyState(
      doc,
      records.length === 0
        ? "No out-of-domain intents recorded yet."
        : "No records match the search.",
    );
  }
  const table = el(doc, "table", "ood-table");
  const head = el(doc, "tr");
  for (const title of ["Keywords", "Count", "First seen", "Last seen", "Example query"]) {
    head.appendChild(el(doc, "th", undefined, title));
  }
  table.appendChild(head);
  for (const record of visible) {
    const row = el(doc, "tr", "ood-row");
    row.dataset.recordId = record.record_id;
    row.appendChild(el(doc, "td", "ood-keywords", record.keywords.join(", ")));
    row.appendChild(el(doc, "td", "ood-count", String(record.count)));
    row.appendChild(el(doc, "td", undefined, record.first_seen));
    row.appendChild(el(doc, "td", undefined, record.last_seen));
    row.appendChild(el(doc, "td", "ood-example", record.example_query));
    table.appendChild(row);
  }
  return table;
}

export function renderHistory(
  doc: Document,
  entries: { response: QueryResponse; feedback?: { feedbackId: string } }[],
): HTMLElement {
  const list = el(doc, "ul", "history-list");
  for (const entry of [...entries].reverse()) {
    const item = el(doc, "li", "history-item");
    item.appendChild(el(doc, "span", `route-dot route-${entry.response.route}`));
    item.appendChild(el(doc, "span", "history-query", entry.response.query_id));
    item.appendChild(
      el(doc, "span", "history-state",
         entry.feedback ? `feedback ${entry.feedback.feedbackId}` : "pending"),
    );
    list.appendChild(item);
  }
  return list;
}
