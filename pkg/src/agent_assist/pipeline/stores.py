"""Append-only persistence for the feedback loop and mined OOD intents.

Both stores write one JSON line per event and rebuild their in-memory
index on startup; nothing is ever mutated or deleted in place. Writes are
serialized behind a lock so concurrent request handling cannot lose or
duplicate records.
"""

from __future__ import annotations

import itertools
import json
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from hashlib import sha1
from pathlib import Path
from typing import Callable, Sequence

from agent_assist.generation.preprocess import QARecord

VERDICTS = ("approve", "edit", "reject")


class UnknownQueryError(KeyError):
    """Feedback referenced a query id that was never issued (or has been
    evicted from the bounded registry)."""


_id_lock = threading.Lock()
_id_counter = itertools.count()


def new_query_id() -> str:
    """Time-ordered unique id, safe under concurrent generation."""
    with _id_lock:
        return f"q{time.time_ns():019d}-{next(_id_counter):06d}"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class OODIntentRecord:
    record_id: str
    keywords: tuple[str, ...]
    example_query: str
    count: int = 1
    first_seen: str = ""
    last_seen: str = ""


class OODIntentStore:
    """Tracks mined out-of-domain keyword sets; identical sets merge."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._records: dict[str, OODIntentRecord] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            with open(self.path, "r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        event = json.loads(line)
                        self._apply(tuple(event["keywords"]), event["query"], event["ts"])

    @staticmethod
    def record_id_for(keywords: Sequence[str]) -> str:
        digest = sha1("|".join(sorted(keywords)).encode("utf-8")).hexdigest()
        return f"ood-{digest[:12]}"

    def _apply(self, keywords: tuple[str, ...], query: str, ts: str) -> str:
        record_id = self.record_id_for(keywords)
        existing = self._records.get(record_id)
        if existing is None:
            self._records[record_id] = OODIntentRecord(
                record_id, keywords, query, count=1, first_seen=ts, last_seen=ts
            )
        else:
            existing.count += 1
            existing.last_seen = ts
        return record_id

    def record(self, keywords: Sequence[str], query: str) -> str:
        if not keywords:
            raise ValueError("keywords must be nonempty")
        keywords = tuple(keywords)
        ts = _utc_now()
        with self._lock:
            record_id = self._apply(keywords, query, ts)
            if self.path:
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(json.dumps(
                        {"keywords": list(keywords), "query": query, "ts": ts}
                    ) + "\n")
        return record_id

    def records(self) -> list[OODIntentRecord]:
        with self._lock:
            return sorted(
                self._records.values(),
                key=lambda r: (-r.count, r.first_seen, r.record_id),
            )


@dataclass(frozen=True)
class FeedbackRecord:
    query_id: str
    verdict: str
    edited_text: str | None = None
    agent_id: str = ""
    feedback_id: str | None = None
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")
        if self.verdict == "edit" and not (self.edited_text or "").strip():
            raise ValueError("verdict=edit requires edited_text")
        if self.verdict != "edit" and self.edited_text is not None:
            raise ValueError("edited_text is only allowed with verdict=edit")


@dataclass
class ResultSnapshot:
    """What feedback needs to remember about an answered query."""

    query_id: str
    query: str
    route: str
    draft: str | None = None
    context_ids: list[str] = field(default_factory=list)
    context_texts: list[str] = field(default_factory=list)


class FeedbackStore:
    """Append-only feedback log joined to a bounded result registry."""

    def __init__(
        self,
        path: str | Path | None = None,
        results_path: str | Path | None = None,
        known_ids_capacity: int = 100_000,
    ):
        self.path = Path(path) if path else None
        self.results_path = Path(results_path) if results_path else None
        self.known_ids_capacity = known_ids_capacity
        self._snapshots: dict[str, ResultSnapshot] = {}
        self._feedback: dict[str, FeedbackRecord] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count()
        if self.results_path and self.results_path.exists():
            with open(self.results_path, "r", encoding="utf-8") as handle:
                for line in handle:
                    if line.strip():
                        self._remember(ResultSnapshot(**json.loads(line)))
        if self.path and self.path.exists():
            with open(self.path, "r", encoding="utf-8") as handle:
                for line in handle:
                    if line.strip():
                        record = FeedbackRecord(**json.loads(line))
                        self._feedback[record.feedback_id] = record
            self._counter = itertools.count(len(self._feedback))

    def _remember(self, snapshot: ResultSnapshot) -> None:
        self._snapshots[snapshot.query_id] = snapshot
        while len(self._snapshots) > self.known_ids_capacity:
            oldest = next(iter(self._snapshots))
            del self._snapshots[oldest]

    def register_result(self, snapshot: ResultSnapshot) -> None:
        with self._lock:
            self._remember(snapshot)
            if self.results_path:
                with open(self.results_path, "a", encoding="utf-8") as handle:
                    handle.write(json.dumps(snapshot.__dict__) + "\n")

    def knows(self, query_id: str) -> bool:
        with self._lock:
            return query_id in self._snapshots

    def record_feedback(self, record: FeedbackRecord) -> str:
        with self._lock:
            if record.query_id not in self._snapshots:
                raise UnknownQueryError(record.query_id)
            feedback_id = record.feedback_id or f"fb-{next(self._counter):08d}"
            stored = FeedbackRecord(
                query_id=record.query_id,
                verdict=record.verdict,
                edited_text=record.edited_text,
                agent_id=record.agent_id,
                feedback_id=feedback_id,
                timestamp=record.timestamp or _utc_now(),
            )
            self._feedback[feedback_id] = stored
            if self.path:
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(json.dumps(stored.__dict__) + "\n")
        return feedback_id

    def get(self, feedback_id: str) -> FeedbackRecord:
        with self._lock:
            return self._feedback[feedback_id]

    def all_feedback(self) -> list[FeedbackRecord]:
        with self._lock:
            return list(self._feedback.values())

    def snapshot_for(self, query_id: str) -> ResultSnapshot | None:
        with self._lock:
            return self._snapshots.get(query_id)


def export_feedback_for_training(
    store: FeedbackStore,
    record_filter: Callable[[FeedbackRecord], bool] | None = None,
) -> list[QARecord]:
    """Turn agent verdicts into training pairs.

    approve -> (query, draft); edit -> (query, edited text); reject is
    excluded. Records whose query lacks a draft (and have no edit) cannot
    form a pair and are skipped.
    """
    exported = []
    for record in store.all_feedback():
        if record.verdict == "reject":
            continue
        if record_filter is not None and not record_filter(record):
            continue
        snapshot = store.snapshot_for(record.query_id)
        if snapshot is None:
            continue
        answer = record.edited_text if record.verdict == "edit" else snapshot.draft
        if not answer or not answer.strip():
            continue
        exported.append(QARecord(
            question=snapshot.query,
            answer=answer,
            context_passages=list(snapshot.context_texts),
        ))
    return exported
