"""Dense embedding index and exact top-k retrieval.

Search is exact (full scoring plus sort): the case-study KBs are hundreds
to low thousands of entries, so approximate structures would add
complexity without payoff. Ties are broken by ascending passage id for
full determinism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from agent_assist.backends.base import TextEncoder
from agent_assist.backends.ops import encode_texts
from agent_assist.retrieval.chunking import Passage, QAPair

SIMILARITIES = ("dot", "cosine")


@dataclass(frozen=True)
class RankedContext:
    """One retrieved unit with its scores and final position."""

    passage: Passage | QAPair
    retriever_score: float
    rank: int
    reranker_score: float | None = None

    @property
    def context_id(self) -> str:
        if isinstance(self.passage, QAPair):
            return self.passage.pair_id
        return self.passage.passage_id

    @property
    def scoring_text(self) -> str:
        """The text retrieval similarity is computed against."""
        if isinstance(self.passage, QAPair):
            return self.passage.question
        return self.passage.text

    def to_dict(self) -> dict:
        return {
            "passage_id": self.context_id,
            "text": self.passage.text if isinstance(self.passage, Passage)
            else f"{self.passage.question} {self.passage.answer}",
            "retriever_score": self.retriever_score,
            "reranker_score": self.reranker_score,
            "rank": self.rank,
        }


def _index_text(unit: Passage | QAPair) -> str:
    # QA pairs are indexed by their question; the answer rides along.
    return unit.question if isinstance(unit, QAPair) else unit.text


def _unit_id(unit: Passage | QAPair) -> str:
    return unit.pair_id if isinstance(unit, QAPair) else unit.passage_id


class EmbeddingIndex:
    def __init__(
        self,
        passage_ids: Sequence[str],
        vectors: np.ndarray,
        encoder_checkpoint: str,
        similarity: str = "dot",
        payloads: dict[str, Passage | QAPair] | None = None,
    ):
        if similarity not in SIMILARITIES:
            raise ValueError(f"similarity must be one of {SIMILARITIES}")
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape[0] != len(passage_ids):
            raise ValueError("vectors must be [n x d] with one row per id")
        if vectors.size and not np.isfinite(vectors).all():
            raise ValueError("index vectors must be finite")
        self.passage_ids = list(passage_ids)
        self.vectors = vectors
        self.encoder_checkpoint = encoder_checkpoint
        self.similarity = similarity
        self.payloads = dict(payloads or {})

    def __len__(self) -> int:
        return len(self.passage_ids)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def scores(self, query_vector: np.ndarray) -> np.ndarray:
        query_vector = np.asarray(query_vector, dtype=np.float32)
        if self.similarity == "dot":
            return self.vectors @ query_vector
        norms = np.linalg.norm(self.vectors, axis=1) * np.linalg.norm(query_vector)
        norms[norms == 0] = 1.0
        return (self.vectors @ query_vector) / norms

    def search(self, query_vector: np.ndarray, k: int) -> list[tuple[str, float]]:
        """Exact top-k (id, score), descending score, ties by ascending id."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self.passage_ids:
            return []
        scored = self.scores(query_vector)
        order = sorted(range(len(scored)), key=lambda i: (-scored[i], self.passage_ids[i]))
        return [(self.passage_ids[i], float(scored[i])) for i in order[:k]]

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        manifest = {
            "encoder_checkpoint": self.encoder_checkpoint,
            "similarity": self.similarity,
            "count": len(self.passage_ids),
            "dim": int(self.dim),
        }
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
        (directory / "ids.json").write_text(json.dumps(self.passage_ids))
        (directory / "vectors.bin").write_bytes(
            np.ascontiguousarray(self.vectors, dtype="<f4").tobytes()
        )
        with open(directory / "passages.jsonl", "w", encoding="utf-8") as handle:
            for pid in self.passage_ids:
                payload = self.payloads.get(pid)
                if payload is None:
                    continue
                kind = "qa_pair" if isinstance(payload, QAPair) else "passage"
                handle.write(json.dumps({"kind": kind, **payload.to_dict()}) + "\n")

    @classmethod
    def load(cls, directory) -> "EmbeddingIndex":
        directory = Path(directory)
        manifest = json.loads((directory / "manifest.json").read_text())
        ids = json.loads((directory / "ids.json").read_text())
        raw = (directory / "vectors.bin").read_bytes()
        vectors = np.frombuffer(raw, dtype="<f4").reshape(manifest["count"], manifest["dim"])
        payloads: dict[str, Passage | QAPair] = {}
        payload_file = directory / "passages.jsonl"
        if payload_file.exists():
            with open(payload_file, "r", encoding="utf-8") as handle:
                for line in handle:
                    row = json.loads(line)
                    if row.pop("kind") == "qa_pair":
                        unit: Passage | QAPair = QAPair(
                            row["pair_id"], row["question"], row["answer"]
                        )
                    else:
                        unit = Passage(
                            row["passage_id"], row["doc_id"], row["text"],
                            tuple(row["sentence_span"]), row["corpus_variant"],
                        )
                    payloads[_unit_id(unit)] = unit
        return cls(ids, vectors, manifest["encoder_checkpoint"],
                   manifest["similarity"], payloads)


def build_index(
    passages: Sequence[Passage | QAPair],
    encoder: TextEncoder,
    similarity: str = "dot",
) -> EmbeddingIndex:
    ids = [_unit_id(p) for p in passages]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate passage ids in index input")
    vectors = encode_texts([_index_text(p) for p in passages], encoder, mode="passage")
    return EmbeddingIndex(ids, vectors, encoder.spec.checkpoint_name, similarity,
                          payloads=dict(zip(ids, passages)))


def retrieve(
    query: str, index: EmbeddingIndex, encoder: TextEncoder, k: int
) -> list[RankedContext]:
    """Top-k most similar units, ranked 1..min(k, n)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        return []
    query_vector = encode_texts([query], encoder, mode="query")[0]
    hits = index.search(query_vector, k)
    return [
        RankedContext(passage=index.payloads[pid], retriever_score=score, rank=position)
        for position, (pid, score) in enumerate(hits, start=1)
    ]


class DenseRetriever:
    """Bundles an encoder with an index built from the same checkpoint."""

    def __init__(self, encoder: TextEncoder, index: EmbeddingIndex):
        self.encoder = encoder
        self.index = index

    def retrieve(self, query: str, k: int) -> list[RankedContext]:
        return retrieve(query, self.index, self.encoder, k)
