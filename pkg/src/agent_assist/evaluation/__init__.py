from agent_assist.evaluation.harness import (
    EvalReport,
    RetrievalFixture,
    evaluate_generation,
    evaluate_retrieval,
    load_retrieval_fixtures,
)
from agent_assist.evaluation.manual import (
    ManualScore,
    ManualScoreReport,
    ingest_manual_scores,
)
from agent_assist.evaluation.metrics import (
    RankingJudgment,
    TextPair,
    average_precision,
    bleu1,
    macro_f1,
    mean_average_precision,
    mrr,
    normalize_tokens,
    reciprocal_rank,
    rouge1,
    rouge_l,
    token_f1,
)

__all__ = [
    "EvalReport",
    "RetrievalFixture",
    "evaluate_generation",
    "evaluate_retrieval",
    "load_retrieval_fixtures",
    "ManualScore",
    "ManualScoreReport",
    "ingest_manual_scores",
    "RankingJudgment",
    "TextPair",
    "average_precision",
    "bleu1",
    "macro_f1",
    "mean_average_precision",
    "mrr",
    "normalize_tokens",
    "reciprocal_rank",
    "rouge1",
    "rouge_l",
    "token_f1",
]
