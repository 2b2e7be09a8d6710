"""KB documents, sentence splitting, and sentence-window passage chunking.

Passage size is a sentence count: 2 = short, 3 = medium, 4 = long. The
"clean" corpus variant normalizes whitespace, strips control characters,
and drops lines with fewer than three alphabetic characters before
splitting.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable

# Word endings that do not terminate a sentence when followed by a period.
ABBREVIATIONS = frozenset(
    "dr mr mrs ms prof st vs etc e.g i.e cf fig no al inc ltd co corp jr sr "
    "u.s u.k a.m p.m".split()
)

_TERMINATOR = re.compile(r"([.?!]+)(?=\s|$)")


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    title: str = ""
    source: str = ""

    def to_dict(self) -> dict:
        return {"doc_id": self.doc_id, "title": self.title, "text": self.text,
                "source": self.source}


@dataclass(frozen=True)
class QAPair:
    pair_id: str
    question: str
    answer: str

    def __post_init__(self) -> None:
        if not self.question.strip() or not self.answer.strip():
            raise ValueError("question and answer must be nonempty")

    def to_dict(self) -> dict:
        return {"pair_id": self.pair_id, "question": self.question, "answer": self.answer}


@dataclass(frozen=True)
class Passage:
    passage_id: str
    doc_id: str
    text: str
    sentence_span: tuple[int, int]
    corpus_variant: str = "raw"

    def __post_init__(self) -> None:
        start, end = self.sentence_span
        if not start < end:
            raise ValueError("sentence_span start must be < end")

    def to_dict(self) -> dict:
        return {
            "passage_id": self.passage_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "sentence_span": list(self.sentence_span),
            "corpus_variant": self.corpus_variant,
        }


@dataclass(frozen=True)
class ChunkingConfig:
    sentences_per_passage: int = 3
    overlap: int = 0
    clean: bool = False

    def __post_init__(self) -> None:
        if self.sentences_per_passage < 1:
            raise ValueError("sentences_per_passage must be >= 1")
        if not 0 <= self.overlap < self.sentences_per_passage:
            raise ValueError("overlap must satisfy 0 <= overlap < sentences_per_passage")


def split_sentences(text: str) -> list[str]:
    """Rule-based splitting on ``. ? !`` with an abbreviation exception list.

    Joining the result with single spaces reproduces the input modulo
    collapsed whitespace.
    """
    sentences: list[str] = []
    start = 0
    for match in _TERMINATOR.finditer(text):
        terminator = match.group(1)
        if terminator == ".":
            before = text[start : match.start(1)].rstrip()
            last_word = before.split()[-1].lower().lstrip("(\"'") if before.split() else ""
            if last_word in ABBREVIATIONS:
                continue
        sentence = text[start : match.end(1)].strip()
        if sentence:
            sentences.append(sentence)
        start = match.end(1)
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def clean_text(text: str) -> str:
    text = "".join(
        ch for ch in text if ch in "\n\t" or unicodedata.category(ch) != "Cc"
    )
    lines = [ln for ln in text.split("\n") if sum(c.isalpha() for c in ln) >= 3]
    return " ".join(" ".join(lines).split())


def chunk_document(doc: Document, cfg: ChunkingConfig) -> list[Passage]:
    """Cut a document into consecutive sentence windows.

    Windows have ``sentences_per_passage`` sentences and advance by
    ``sentences_per_passage - overlap``; a shorter final remainder is kept.
    """
    if not doc.text.strip():
        raise ValueError("document text must be nonempty")
    text = clean_text(doc.text) if cfg.clean else doc.text
    sentences = split_sentences(text)
    if not sentences:
        return []

    size = cfg.sentences_per_passage
    step = size - cfg.overlap
    variant = "clean" if cfg.clean else "raw"
    passages = []
    i = 0
    while i < len(sentences):
        j = min(i + size, len(sentences))
        passages.append(
            Passage(
                passage_id=f"{doc.doc_id}:{i}-{j}",
                doc_id=doc.doc_id,
                text=" ".join(sentences[i:j]),
                sentence_span=(i, j),
                corpus_variant=variant,
            )
        )
        if j == len(sentences):
            break
        i += step
    return passages


def load_kb(path) -> list[Document] | list[QAPair]:
    """Read a KB from JSON-lines: document records or question-answer pairs.

    A file must be homogeneous; mixing the two record shapes is rejected.
    """
    docs: list[Document] = []
    pairs: list[QAPair] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if "doc_id" in row:
                docs.append(Document(
                    doc_id=str(row["doc_id"]), text=row["text"],
                    title=row.get("title", ""), source=row.get("source", ""),
                ))
            elif "pair_id" in row:
                pairs.append(QAPair(str(row["pair_id"]), row["question"], row["answer"]))
            else:
                raise ValueError(f"{path}:{line_no}: record is neither a document nor a QA pair")
    if docs and pairs:
        raise ValueError(f"{path}: mixed document and QA-pair records are not allowed")
    return pairs if pairs else docs


def chunk_corpus(docs: Iterable[Document], cfg: ChunkingConfig) -> list[Passage]:
    passages = []
    for doc in docs:
        passages.extend(chunk_document(doc, cfg))
    return passages
