"""Prompt assembly under a fixed token budget.

Assembled sequences look like::

    <ctx> c1 tokens... <ctx> c2 tokens... <q> question tokens... <a> [answer...]

with every token (markers included) tagged with its segment. When the
budget is exceeded, context tokens are dropped from the end of the last
context backwards; the question is never truncated while any context token
remains, and a question that cannot fit on its own is an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from agent_assist.backends.base import InputTooLongError, TextGenerator

SEGMENT_CONTEXT = "context"
SEGMENT_QUESTION = "question"
SEGMENT_ANSWER = "answer"


@dataclass(frozen=True)
class PromptLayout:
    max_input_tokens: int = 330

    def __post_init__(self) -> None:
        if self.max_input_tokens <= 0:
            raise ValueError("max_input_tokens must be positive")


@dataclass
class PromptTokens:
    ids: list[int]
    segments: list[str]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.segments):
            raise ValueError("ids and segments must have equal length")

    def __len__(self) -> int:
        return len(self.ids)

    def segment_ids(self, segment: str) -> list[int]:
        return [i for i, s in zip(self.ids, self.segments) if s == segment]


def assemble_prompt(
    question: str,
    contexts: Sequence[str],
    layout: PromptLayout,
    tokenizer: TextGenerator,
    *,
    answer: str | None = None,
    append_eos: bool = False,
) -> PromptTokens:
    if not question.strip():
        raise ValueError("question must be nonempty")
    budget = layout.max_input_tokens
    markers = tokenizer.marker_ids

    question_ids = tokenizer.encode_text(question)
    answer_ids = tokenizer.encode_text(answer) if answer is not None else []
    if answer is not None and append_eos:
        answer_ids = answer_ids + [tokenizer.eos_token_id]

    # <q> + question + <a> are protected; the answer may shrink, the
    # question may not.
    fixed = 1 + len(question_ids) + 1
    if fixed > budget:
        raise InputTooLongError(
            f"question needs {fixed} tokens, over the {budget}-token budget"
        )
    answer_keep = min(len(answer_ids), budget - fixed)
    remaining = budget - fixed - answer_keep

    ids: list[int] = []
    segments: list[str] = []
    for context in contexts:
        if remaining < 2:  # marker plus at least one content token
            break
        context_ids = tokenizer.encode_text(context)[: remaining - 1]
        if not context_ids:
            continue
        ids.append(markers["context"])
        ids.extend(context_ids)
        segments.extend([SEGMENT_CONTEXT] * (1 + len(context_ids)))
        remaining -= 1 + len(context_ids)

    ids.append(markers["question"])
    ids.extend(question_ids)
    segments.extend([SEGMENT_QUESTION] * (1 + len(question_ids)))

    ids.append(markers["answer"])
    ids.extend(answer_ids[:answer_keep])
    segments.extend([SEGMENT_ANSWER] * (1 + answer_keep))

    return PromptTokens(ids, segments)


@dataclass
class MCInstance:
    """Gold-vs-distractor discrimination instance for one training record."""

    question: str
    contexts: list[str]
    candidates: list[str]
    gold_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.gold_index < len(self.candidates):
            raise ValueError("gold_index out of range")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError("candidates must be distinct")


def build_mc_instance(record, corpus, num_distractors: int = 1, seed: int = 0) -> MCInstance:
    """Pair a record's gold answer with answers sampled from other records.

    Distractors are drawn uniformly without replacement from the distinct
    answers of the rest of the corpus; the gold answer lands at a
    seed-determined position. Deterministic for a fixed seed.
    """
    import numpy as np

    if num_distractors < 0:
        raise ValueError("num_distractors must be >= 0")
    gold = record.answer
    pool: list[str] = []
    seen = {gold}
    for other in corpus:
        if other is record:
            continue
        if other.answer not in seen:
            pool.append(other.answer)
            seen.add(other.answer)
    if num_distractors > len(pool):
        raise ValueError(
            f"corpus provides {len(pool)} distinct distractors, need {num_distractors}"
        )
    rng = np.random.default_rng(seed)
    chosen = [pool[i] for i in rng.choice(len(pool), size=num_distractors, replace=False)] \
        if num_distractors else []
    gold_index = int(rng.integers(0, num_distractors + 1))
    candidates = chosen[:gold_index] + [gold] + chosen[gold_index:]
    return MCInstance(record.question, list(record.context_passages), candidates, gold_index)
