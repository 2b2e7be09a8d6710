"""Shared scripted test doubles and the acceptance summary hook."""

from __future__ import annotations

import math

import numpy as np
import pytest

from agent_assist.backends.base import EncoderSpec, GeneratorSpec
from agent_assist.intent.classifier import IntentPrediction
from agent_assist.retrieval.chunking import Passage
from agent_assist.retrieval.index import RankedContext


class ScriptedEncoder:
    """Encoder whose outputs are looked up from an explicit table."""

    def __init__(self, table: dict[str, list[float]], dim: int,
                 checkpoint_name: str = "scripted:encoder", default: str = "zeros"):
        self.spec = EncoderSpec(checkpoint_name, dim, 256)
        self.table = {k: np.asarray(v, dtype=np.float32) for k, v in table.items()}
        self.default = default
        self.calls = 0

    def encode(self, texts, mode="query"):
        self.calls += 1
        rows = []
        for text in texts:
            if text in self.table:
                rows.append(self.table[text])
            elif self.default == "zeros":
                rows.append(np.zeros(self.spec.embedding_dim, dtype=np.float32))
            else:
                raise KeyError(f"no scripted embedding for {text!r}")
        if not rows:
            return np.zeros((0, self.spec.embedding_dim), dtype=np.float32)
        return np.stack(rows)


class ScriptedPairScorer:
    """Pair scorer with a fixed (query, passage) -> score table."""

    def __init__(self, table: dict[tuple[str, str], float], default: float = 0.0):
        self.spec = EncoderSpec("scripted:scorer", 1, 512)
        self.table = dict(table)
        self.default = default
        self.calls = 0

    def score(self, pairs):
        self.calls += 1
        return [float(self.table.get(tuple(p), self.default)) for p in pairs]


class ScriptedGate:
    """Gate with per-query scripted confidence (in-domain iff conf > threshold)."""

    def __init__(self, confidences: dict[str, float] | float):
        self.confidences = confidences
        self.calls = 0

    def decide(self, query: str, threshold: float = 0.5):
        self.calls += 1
        conf = (self.confidences if isinstance(self.confidences, float)
                else self.confidences[query])
        return conf > threshold, conf


class ScriptedIntentClassifier:
    """Intent classifier with scripted top-label confidence."""

    def __init__(self, confidences: dict[str, float] | float, label: str = "card-activation",
                 encoder=None):
        self.confidences = confidences
        self.label = label
        self.encoder = encoder
        self.calls = 0

    def predict(self, query: str) -> IntentPrediction:
        self.calls += 1
        conf = (self.confidences if isinstance(self.confidences, float)
                else self.confidences[query])
        return IntentPrediction(
            probabilities=np.array([conf, 1.0 - conf]),
            top_label=self.label,
            confidence=conf,
        )


class CountingRetriever:
    """Retriever returning canned passages, counting invocations."""

    def __init__(self, passages: list[str] | None = None):
        texts = passages if passages is not None else [
            "reset your card pin in the mobile app",
            "card activation happens in the app",
            "transfer fee information for accounts",
            "open a new account online",
            "balance can be seen in the app",
        ]
        self.results = [
            RankedContext(
                passage=Passage(f"p{i}", "doc", text, (i, i + 1)),
                retriever_score=float(len(texts) - i),
                rank=i + 1,
            )
            for i, text in enumerate(texts)
        ]
        self.calls = 0

    def retrieve(self, query: str, k: int):
        self.calls += 1
        return self.results[:k]


class WordTokenizerMixin:
    """Word-level tokenizer over a vocabulary built at construction."""

    SPECIALS = ("<pad>", "<eos>", "<ctx>", "<q>", "<a>")

    def _init_vocab(self, texts):
        words = []
        for text in texts:
            for w in text.lower().split():
                if w not in words:
                    words.append(w)
        self.vocab = list(self.SPECIALS) + words
        self.word_to_id = {w: i for i, w in enumerate(self.vocab)}
        self.eos_token_id = 1
        self.marker_ids = {"context": 2, "question": 3, "answer": 4}

    def encode_text(self, text):
        return [self.word_to_id[w] for w in text.lower().split() if w in self.word_to_id]

    def decode_tokens(self, ids):
        return " ".join(self.vocab[i] for i in ids if i >= len(self.SPECIALS))


class EchoAnswerGenerator(WordTokenizerMixin):
    """Deterministically emits the scripted answer for the prompted question.

    Reads the question out of its own prompt (tokens after the question
    marker, before the answer marker), then puts all probability mass on
    the next token of the mapped answer, then on end-of-sequence.
    """

    def __init__(self, answers: dict[str, str], max_context_tokens: int = 4096):
        self._init_vocab(list(answers.keys()) + list(answers.values()))
        self.answers = {q.lower(): a for q, a in answers.items()}
        self.spec = GeneratorSpec("scripted:echo", len(self.vocab), max_context_tokens)

    def next_logits(self, token_ids):
        ids = list(token_ids)
        q_marker, a_marker = self.marker_ids["question"], self.marker_ids["answer"]
        q_pos = len(ids) - 1 - ids[::-1].index(q_marker)
        a_pos = len(ids) - 1 - ids[::-1].index(a_marker)
        question = self.decode_tokens(ids[q_pos + 1 : a_pos])
        emitted = len(ids) - (a_pos + 1)
        answer_ids = self.encode_text(self.answers.get(question, ""))
        target = answer_ids[emitted] if emitted < len(answer_ids) else self.eos_token_id
        logits = np.full(len(self.vocab), -1e9)
        logits[target] = 10.0
        return logits


class SilentGenerator(WordTokenizerMixin):
    """Generator that immediately emits end-of-sequence."""

    def __init__(self):
        self._init_vocab(["placeholder words"])
        self.spec = GeneratorSpec("scripted:silent", len(self.vocab), 4096)

    def next_logits(self, token_ids):
        logits = np.full(len(self.vocab), -1e9)
        logits[self.eos_token_id] = 10.0
        return logits


def sigmoid_logit(confidence: float) -> float:
    """Inverse sigmoid, clamped so encoders stay finite."""
    if confidence <= 0.0:
        return -745.0
    if confidence >= 1.0:
        return 745.0
    return math.log(confidence / (1.0 - confidence))


ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        label = marker.kwargs.get("label", item.name)
        ACCEPTANCE_RESULTS[label] = report.outcome
    elif marker and report.when == "setup" and report.skipped:
        label = marker.kwargs.get("label", item.name)
        ACCEPTANCE_RESULTS[label] = "skipped"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS):
        outcome = ACCEPTANCE_RESULTS[label]
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"{word}  {label}")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(label): marks a test as an acceptance criterion"
    )
