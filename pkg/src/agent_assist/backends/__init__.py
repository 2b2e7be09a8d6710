from agent_assist.backends.base import (
    BackendError,
    BackendUnavailableError,
    DecodingConfig,
    EncoderSpec,
    GeneratorSpec,
    InputTooLongError,
    PairScorer,
    TextEncoder,
    TextGenerator,
    Translator,
)
from agent_assist.backends.ops import encode_texts, generate_tokens, score_pairs, translate
from agent_assist.backends.registry import (
    load_encoder,
    load_generator,
    load_pair_scorer,
    load_translator,
)

__all__ = [
    "BackendError",
    "BackendUnavailableError",
    "DecodingConfig",
    "EncoderSpec",
    "GeneratorSpec",
    "InputTooLongError",
    "PairScorer",
    "TextEncoder",
    "TextGenerator",
    "Translator",
    "encode_texts",
    "generate_tokens",
    "score_pairs",
    "translate",
    "load_encoder",
    "load_generator",
    "load_pair_scorer",
    "load_translator",
]
