from agent_assist.generation.decoding import (
    decode_tokens,
    filtered_distribution,
    sample_next_token,
)
from agent_assist.generation.preprocess import (
    PreprocessStats,
    QARecord,
    load_qa_records,
    preprocess_msmarco,
    preprocess_msmarco_corpus,
    save_qa_records,
)
from agent_assist.generation.prompts import (
    SEGMENT_ANSWER,
    SEGMENT_CONTEXT,
    SEGMENT_QUESTION,
    MCInstance,
    PromptLayout,
    PromptTokens,
    assemble_prompt,
    build_mc_instance,
)
from agent_assist.generation.respond import GeneratedResponse, generate_response
from agent_assist.generation.training import (
    GenTrainConfig,
    GenTrainResult,
    batch_losses,
    lm_loss_for_record,
    mc_loss_for_instance,
    train_generator,
)

__all__ = [
    "decode_tokens",
    "filtered_distribution",
    "sample_next_token",
    "PreprocessStats",
    "QARecord",
    "load_qa_records",
    "preprocess_msmarco",
    "preprocess_msmarco_corpus",
    "save_qa_records",
    "SEGMENT_ANSWER",
    "SEGMENT_CONTEXT",
    "SEGMENT_QUESTION",
    "MCInstance",
    "PromptLayout",
    "PromptTokens",
    "assemble_prompt",
    "build_mc_instance",
    "GeneratedResponse",
    "generate_response",
    "GenTrainConfig",
    "GenTrainResult",
    "batch_losses",
    "lm_loss_for_record",
    "mc_loss_for_instance",
    "train_generator",
]
