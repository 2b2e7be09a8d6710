"""Grounded-QA dataset records and raw-corpus preprocessing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

_NO_ANSWER_PLACEHOLDER = "no answer present."


@dataclass
class QARecord:
    """One knowledge-grounded training/eval example."""

    question: str
    answer: str
    context_passages: list[str] = field(default_factory=list)
    well_formed: bool = False

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("question must be nonempty")
        if not self.answer.strip():
            raise ValueError("answer must be nonempty")

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "answer": self.answer,
            "contexts": list(self.context_passages),
            "well_formed": self.well_formed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QARecord":
        return cls(
            question=data["question"],
            answer=data["answer"],
            context_passages=list(data.get("contexts", data.get("context_passages", []))),
            well_formed=bool(data.get("well_formed", False)),
        )


@dataclass
class PreprocessStats:
    kept: int = 0
    skipped_no_answer: int = 0
    skipped_multiple_answers: int = 0
    skipped_malformed: int = 0


def _real_answers(values) -> list[str]:
    if isinstance(values, str):
        try:
            values = json.loads(values)
        except (ValueError, TypeError):
            values = [values]
    if not isinstance(values, (list, tuple)):
        return []
    out = []
    for v in values:
        if isinstance(v, str) and v.strip() and v.strip().lower() != _NO_ANSWER_PLACEHOLDER:
            out.append(v.strip())
    return out


def _passage_texts(raw) -> list[str]:
    texts = []
    for p in raw or []:
        if isinstance(p, str):
            texts.append(p)
        elif isinstance(p, dict) and "passage_text" in p:
            texts.append(str(p["passage_text"]))
        elif isinstance(p, dict) and "text" in p:
            texts.append(str(p["text"]))
    return texts


def preprocess_msmarco(record: dict, stats: PreprocessStats | None = None) -> QARecord | None:
    """Normalize one raw search-QA record, or return None to skip it.

    The well-formed answer is used when present; a record with several
    plain answers and no well-formed one is dropped, as is a record with
    no usable answer at all.
    """
    stats = stats if stats is not None else PreprocessStats()
    if not isinstance(record, dict):
        stats.skipped_malformed += 1
        return None
    question = str(record.get("query") or record.get("question") or "").strip()
    if not question:
        stats.skipped_malformed += 1
        return None

    well_formed = _real_answers(
        record.get("wellFormedAnswers", record.get("well_formed_answers"))
    )
    answers = _real_answers(record.get("answers"))
    contexts = _passage_texts(record.get("passages") or record.get("contexts"))

    if well_formed:
        answer, is_well_formed = well_formed[0], True
    elif len(answers) == 1:
        answer, is_well_formed = answers[0], False
    elif len(answers) == 0:
        stats.skipped_no_answer += 1
        return None
    else:
        stats.skipped_multiple_answers += 1
        return None

    stats.kept += 1
    return QARecord(question, answer, contexts, is_well_formed)


def preprocess_msmarco_corpus(
    records: Iterable[dict],
) -> tuple[list[QARecord], PreprocessStats]:
    stats = PreprocessStats()
    kept = []
    for raw in records:
        record = preprocess_msmarco(raw, stats)
        if record is not None:
            kept.append(record)
    return kept, stats


def load_qa_records(path) -> list[QARecord]:
    """Read QARecords from a JSON-lines file."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(QARecord.from_dict(json.loads(line)))
    return records


def save_qa_records(records: Sequence[QARecord], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict()) + "\n")
