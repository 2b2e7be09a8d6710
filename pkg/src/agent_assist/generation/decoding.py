"""Sampling-based decoding: top-k and nucleus filtering over logits.

The filtering pipeline, in order: keep the top-k logits (k > 0), divide by
temperature, softmax, then keep the smallest descending-probability prefix
with cumulative mass >= p (p > 0) and renormalize. Filtered-out tokens get
probability exactly zero.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from agent_assist.backends.base import DecodingConfig


def filtered_distribution(logits: np.ndarray, cfg: DecodingConfig) -> np.ndarray:
    """The exact distribution ``sample_next_token`` draws from."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1 or logits.size == 0:
        raise ValueError("logits must be a nonempty 1-D array")
    if np.isnan(logits).any() or np.isposinf(logits).any():
        raise ValueError("logits must not contain NaN or +inf")
    finite = np.isfinite(logits)
    if not finite.any():
        raise ValueError("no finite logits to sample from")

    kept = logits.copy()
    if cfg.top_k > 0 and cfg.top_k < logits.size:
        # Stable order: ties at the cut broken by lower token id.
        order = np.argsort(-logits, kind="stable")
        kept[:] = -np.inf
        kept[order[: cfg.top_k]] = logits[order[: cfg.top_k]]

    scaled = kept / cfg.temperature
    scaled -= scaled[np.isfinite(scaled)].max()
    probs = np.exp(scaled, where=np.isfinite(scaled), out=np.zeros_like(scaled))
    probs /= probs.sum()

    if cfg.top_p > 0.0:
        order = np.argsort(-probs, kind="stable")
        cumulative = np.cumsum(probs[order])
        cutoff = int(np.searchsorted(cumulative, min(cfg.top_p, cumulative[-1]))) + 1
        nucleus = order[:cutoff]
        trimmed = np.zeros_like(probs)
        trimmed[nucleus] = probs[nucleus]
        probs = trimmed / trimmed.sum()

    return probs


def sample_next_token(
    logits: np.ndarray, cfg: DecodingConfig, rng: np.random.Generator
) -> int:
    probs = filtered_distribution(logits, cfg)
    return int(rng.choice(probs.size, p=probs))


def decode_tokens(
    next_logits: Callable[[Sequence[int]], np.ndarray],
    prompt_tokens: Sequence[int],
    cfg: DecodingConfig,
    *,
    eos_token_id: int,
    max_context_tokens: int | None = None,
) -> list[int]:
    """Autoregressive sampling loop.

    Returns the generated continuation (prompt excluded, end-of-sequence
    token excluded). When the running sequence outgrows the context window,
    ``next_logits`` sees a sliding window of the most recent tokens.
    """
    rng = np.random.default_rng(cfg.seed)
    tokens = list(prompt_tokens)
    generated: list[int] = []
    for _ in range(cfg.max_new_tokens):
        window = tokens[-max_context_tokens:] if max_context_tokens else tokens
        token_id = sample_next_token(next_logits(window), cfg, rng)
        if token_id == eos_token_id:
            break
        generated.append(token_id)
        tokens.append(token_id)
    return generated
