"""Evaluation harnesses for the retrieval stack and the generator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

from agent_assist.backends.base import DecodingConfig
from agent_assist.evaluation.metrics import (
    TEXT_METRICS,
    RankingJudgment,
    TextPair,
    mean_average_precision,
    mrr,
)
from agent_assist.generation.preprocess import QARecord
from agent_assist.generation.respond import generate_response
from agent_assist.retrieval.rerank import rerank


@dataclass
class EvalReport:
    metrics: dict[str, float]
    sample_count: int
    protocol: dict = field(default_factory=dict)
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.sample_count <= 0:
            raise ValueError("sample_count must be > 0")
        for name, value in self.metrics.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"metric {name}={value} outside [0, 1]")
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    def to_json(self) -> str:
        return json.dumps(
            {
                "metrics": self.metrics,
                "sample_count": self.sample_count,
                "protocol": self.protocol,
                "timestamp": self.timestamp,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, payload: str) -> "EvalReport":
        data = json.loads(payload)
        return cls(data["metrics"], data["sample_count"], data.get("protocol", {}),
                   data.get("timestamp", ""))


@dataclass(frozen=True)
class RetrievalFixture:
    query_id: str
    query: str
    relevant_ids: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "relevant_ids", frozenset(self.relevant_ids))
        if not self.relevant_ids:
            raise ValueError("relevant_ids must be nonempty")


def load_retrieval_fixtures(path) -> list[RetrievalFixture]:
    fixtures = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            fixtures.append(RetrievalFixture(
                str(row.get("query_id", len(fixtures))),
                row["query"],
                frozenset(row["relevant_ids"]),
            ))
    return fixtures


def evaluate_retrieval(
    retriever,
    reranker,
    fixtures: Sequence[RetrievalFixture],
    pool_size: int = 10,
) -> EvalReport:
    """Run retrieve (and optionally rerank over the top pool) per query.

    Reports retriever-only MRR/MAP and, when a re-ranker is supplied, the
    re-ranked figures computed over the retriever's top ``pool_size``.
    """
    if not fixtures:
        raise ValueError("fixtures must be nonempty")
    first_stage: list[RankingJudgment] = []
    second_stage: list[RankingJudgment] = []
    for fixture in fixtures:
        candidates = retriever.retrieve(fixture.query, pool_size)
        first_stage.append(RankingJudgment(
            fixture.query_id,
            tuple(c.context_id for c in candidates),
            fixture.relevant_ids,
        ))
        if reranker is not None and candidates:
            reordered = rerank(fixture.query, candidates, reranker, top_n=pool_size)
            second_stage.append(RankingJudgment(
                fixture.query_id,
                tuple(c.context_id for c in reordered),
                fixture.relevant_ids,
            ))

    metrics = {
        "retriever_mrr": mrr(first_stage),
        "retriever_map": mean_average_precision(first_stage),
    }
    if second_stage:
        metrics["reranked_mrr"] = mrr(second_stage)
        metrics["reranked_map"] = mean_average_precision(second_stage)
    encoder = getattr(retriever, "encoder", None)
    protocol = {
        "task": "retrieval",
        "pool_size": pool_size,
        "reranked": reranker is not None,
        "encoder": encoder.spec.checkpoint_name if encoder is not None else None,
    }
    return EvalReport(metrics, sample_count=len(fixtures), protocol=protocol)


def evaluate_generation(
    generator,
    fixtures: Sequence[QARecord],
    decoding: DecodingConfig,
) -> EvalReport:
    """Generate one response per fixture and average the text metrics."""
    if not fixtures:
        raise ValueError("fixtures must be nonempty")
    sums = {name: 0.0 for name in TEXT_METRICS}
    for record in fixtures:
        response = generate_response(
            record.question, record.context_passages, generator, decoding
        )
        pair = TextPair(response.text, record.answer)
        for name, fn in TEXT_METRICS.items():
            sums[name] += fn(pair)
    metrics = {name: value / len(fixtures) for name, value in sums.items()}
    protocol = {
        "task": "generation",
        "decoding": decoding.to_dict(),
        "generator": generator.spec.checkpoint_name,
    }
    return EvalReport(metrics, sample_count=len(fixtures), protocol=protocol)
