"""Ranking and text-overlap metrics.

All text metrics share one normalization (lowercase, strip punctuation,
whitespace tokenize) so their values are comparable. Every metric is a
pure function with range [0, 1].

Definitions:
  - MRR: mean over queries of 1/rank of the first relevant id (0 when none
    retrieved).
  - MAP: mean average precision, AP = sum_k P@k * rel(k) / |relevant|.
  - token F1: multiset unigram overlap F1.
  - BLEU-1: clipped unigram precision times brevity penalty
    min(1, exp(1 - r/c)).
  - ROUGE-1 / ROUGE-L: F-measure (beta = 1) of unigram overlap / longest
    common subsequence.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass
from math import exp
from typing import Sequence

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_tokens(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


@dataclass(frozen=True)
class RankingJudgment:
    query_id: str
    ranked_ids: tuple[str, ...]
    relevant_ids: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranked_ids", tuple(self.ranked_ids))
        object.__setattr__(self, "relevant_ids", frozenset(self.relevant_ids))
        if len(set(self.ranked_ids)) != len(self.ranked_ids):
            raise ValueError("ranked_ids must be duplicate-free")
        if not self.relevant_ids:
            raise ValueError("relevant_ids must be nonempty")


@dataclass(frozen=True)
class TextPair:
    prediction: str
    reference: str

    def __post_init__(self) -> None:
        if not self.reference.strip():
            raise ValueError("reference must be nonempty")


def reciprocal_rank(judgment: RankingJudgment) -> float:
    for position, pid in enumerate(judgment.ranked_ids, start=1):
        if pid in judgment.relevant_ids:
            return 1.0 / position
    return 0.0


def mrr(judgments: Sequence[RankingJudgment]) -> float:
    if not judgments:
        raise ValueError("judgments must be nonempty")
    return sum(reciprocal_rank(j) for j in judgments) / len(judgments)


def average_precision(judgment: RankingJudgment) -> float:
    hits = 0
    precision_sum = 0.0
    for position, pid in enumerate(judgment.ranked_ids, start=1):
        if pid in judgment.relevant_ids:
            hits += 1
            precision_sum += hits / position
    return precision_sum / len(judgment.relevant_ids)


def mean_average_precision(judgments: Sequence[RankingJudgment]) -> float:
    if not judgments:
        raise ValueError("judgments must be nonempty")
    return sum(average_precision(j) for j in judgments) / len(judgments)


def _overlap(prediction: list[str], reference: list[str]) -> int:
    counts = Counter(prediction) & Counter(reference)
    return sum(counts.values())


def _f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def token_f1(pair: TextPair) -> float:
    prediction = normalize_tokens(pair.prediction)
    reference = normalize_tokens(pair.reference)
    if not prediction or not reference:
        return 0.0
    overlap = _overlap(prediction, reference)
    return _f_measure(overlap / len(prediction), overlap / len(reference))


def bleu1(pair: TextPair) -> float:
    prediction = normalize_tokens(pair.prediction)
    reference = normalize_tokens(pair.reference)
    if not prediction or not reference:
        return 0.0
    clipped = _overlap(prediction, reference) / len(prediction)
    brevity = min(1.0, exp(1.0 - len(reference) / len(prediction)))
    return clipped * brevity


def rouge1(pair: TextPair) -> float:
    prediction = normalize_tokens(pair.prediction)
    reference = normalize_tokens(pair.reference)
    if not prediction or not reference:
        return 0.0
    overlap = _overlap(prediction, reference)
    return _f_measure(overlap / len(prediction), overlap / len(reference))


def _lcs_length(a: list[str], b: list[str]) -> int:
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge_l(pair: TextPair) -> float:
    prediction = normalize_tokens(pair.prediction)
    reference = normalize_tokens(pair.reference)
    if not prediction or not reference:
        return 0.0
    lcs = _lcs_length(prediction, reference)
    return _f_measure(lcs / len(prediction), lcs / len(reference))


TEXT_METRICS = {
    "token_f1": token_f1,
    "bleu1": bleu1,
    "rouge1": rouge1,
    "rouge_l": rouge_l,
}


def macro_f1(true_labels: Sequence[int], predicted_labels: Sequence[int], n_classes: int) -> float:
    """Macro-averaged F1 over ``n_classes`` classes."""
    if len(true_labels) != len(predicted_labels):
        raise ValueError("label sequences must have equal length")
    if not true_labels:
        raise ValueError("labels must be nonempty")
    per_class = []
    for c in range(n_classes):
        tp = sum(1 for t, p in zip(true_labels, predicted_labels) if t == c and p == c)
        fp = sum(1 for t, p in zip(true_labels, predicted_labels) if t != c and p == c)
        fn = sum(1 for t, p in zip(true_labels, predicted_labels) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        per_class.append(_f_measure(precision, recall))
    return sum(per_class) / n_classes
