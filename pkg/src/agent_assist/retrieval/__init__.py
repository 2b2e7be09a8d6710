from agent_assist.retrieval.chunking import (
    ChunkingConfig,
    Document,
    Passage,
    QAPair,
    chunk_corpus,
    chunk_document,
    clean_text,
    load_kb,
    split_sentences,
)
from agent_assist.retrieval.index import (
    DenseRetriever,
    EmbeddingIndex,
    RankedContext,
    build_index,
    retrieve,
)
from agent_assist.retrieval.mnrl import (
    MNRLConfig,
    mnrl_loss,
    mnrl_loss_and_grad,
    mnrl_loss_torch,
)
from agent_assist.retrieval.rerank import rerank
from agent_assist.retrieval.training import (
    FineTuneResult,
    FineTuneSchedule,
    PreparedPairs,
    prepare_training_pairs,
    train_bi_encoder,
    train_cross_encoder,
)

__all__ = [
    "ChunkingConfig",
    "Document",
    "Passage",
    "QAPair",
    "chunk_corpus",
    "chunk_document",
    "clean_text",
    "load_kb",
    "split_sentences",
    "DenseRetriever",
    "EmbeddingIndex",
    "RankedContext",
    "build_index",
    "retrieve",
    "MNRLConfig",
    "mnrl_loss",
    "mnrl_loss_and_grad",
    "mnrl_loss_torch",
    "rerank",
    "FineTuneResult",
    "FineTuneSchedule",
    "PreparedPairs",
    "prepare_training_pairs",
    "train_bi_encoder",
    "train_cross_encoder",
]
