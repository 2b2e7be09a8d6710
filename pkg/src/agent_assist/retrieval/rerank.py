"""Cross-encoder re-ranking of retrieved candidates."""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from agent_assist.backends.base import PairScorer
from agent_assist.backends.ops import score_pairs
from agent_assist.retrieval.index import RankedContext


def rerank(
    query: str,
    candidates: Sequence[RankedContext],
    cross_encoder: PairScorer,
    top_n: int,
) -> list[RankedContext]:
    """Re-score candidates jointly with the query and keep the best top_n.

    The output is a subset-permutation of the input: retriever scores are
    preserved, reranker scores filled in, and ranks reassigned 1..m by
    descending reranker score (ties by ascending id).
    """
    if not candidates:
        raise ValueError("candidates must be nonempty")
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    scores = score_pairs([(query, c.scoring_text) for c in candidates], cross_encoder)
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-scores[i], candidates[i].context_id),
    )
    return [
        replace(candidates[i], reranker_score=scores[i], rank=position)
        for position, i in enumerate(order[: top_n], start=1)
    ]
