"""Thin, validated entry points over the backend contracts."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from agent_assist.backends.base import (
    ENCODE_MODES,
    BackendError,
    DecodingConfig,
    InputTooLongError,
    PairScorer,
    TextEncoder,
    TextGenerator,
    Translator,
)


def encode_texts(texts: Sequence[str], encoder: TextEncoder, mode: str = "query") -> np.ndarray:
    """Encode ``texts`` into an [n x d] matrix; rows align with inputs."""
    if mode not in ENCODE_MODES:
        raise ValueError(f"mode must be one of {ENCODE_MODES}")
    matrix = encoder.encode(list(texts), mode=mode)
    expected = (len(texts), encoder.spec.embedding_dim)
    if matrix.shape != expected:
        raise BackendError(f"encoder returned shape {matrix.shape}, expected {expected}")
    if matrix.size and not np.isfinite(matrix).all():
        raise BackendError("encoder produced non-finite values")
    return matrix


def score_pairs(pairs: Sequence[tuple[str, str]], cross_encoder: PairScorer) -> list[float]:
    """One relevance score per (query, passage) pair, order preserved."""
    if not pairs:
        return []
    scores = cross_encoder.score(list(pairs))
    if len(scores) != len(pairs):
        raise BackendError("pair scorer returned wrong number of scores")
    if not all(np.isfinite(s) for s in scores):
        raise BackendError("pair scorer produced non-finite scores")
    return [float(s) for s in scores]


def generate_tokens(
    prompt_tokens: Sequence[int], generator: TextGenerator, cfg: DecodingConfig
) -> list[int]:
    """Sample up to ``cfg.max_new_tokens`` continuation tokens.

    Stops early at the generator's end-of-sequence token (not included in
    the output). Reproducible for a fixed seed.
    """
    if len(prompt_tokens) > generator.spec.max_context_tokens:
        raise InputTooLongError(
            f"prompt of {len(prompt_tokens)} tokens exceeds context window "
            f"of {generator.spec.max_context_tokens}"
        )
    from agent_assist.generation.decoding import decode_tokens

    return decode_tokens(
        generator.next_logits,
        prompt_tokens,
        cfg,
        eos_token_id=generator.eos_token_id,
        max_context_tokens=generator.spec.max_context_tokens,
    )


def translate(
    texts: Sequence[str], source_lang: str, target_lang: str, translator: Translator
) -> list[str]:
    """Translate a batch; one output per input, order preserved."""
    if not texts:
        return []
    out = translator.translate(list(texts), source_lang, target_lang)
    if len(out) != len(texts):
        raise BackendError("translator returned wrong number of outputs")
    return list(out)
