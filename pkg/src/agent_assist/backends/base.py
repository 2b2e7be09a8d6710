"""Uniform contracts for the pretrained model backends.

Everything above this layer (intent, retrieval, generation, pipeline) talks
to four abstract roles -- text encoder, pair scorer, text generator,
translator -- and never to a concrete model runtime. Checkpoint names are
opaque strings; ``stub:`` names resolve to deterministic test backends.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

POOLING_MODES = ("mean", "first-token")
ENCODE_MODES = ("query", "passage")


class BackendError(RuntimeError):
    """Base class for backend failures."""


class BackendUnavailableError(BackendError):
    """A checkpoint could not be resolved or loaded."""


class InputTooLongError(ValueError):
    """An input exceeds the generator's context window or prompt budget."""


@dataclass(frozen=True)
class EncoderSpec:
    """Static description of a text encoder checkpoint."""

    checkpoint_name: str
    embedding_dim: int
    max_tokens: int
    pooling: str = "mean"

    def __post_init__(self) -> None:
        if self.embedding_dim <= 0:
            raise ValueError("embedding_dim must be positive")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"pooling must be one of {POOLING_MODES}")


@dataclass(frozen=True)
class GeneratorSpec:
    """Static description of an autoregressive generator checkpoint."""

    checkpoint_name: str
    vocab_size: int
    max_context_tokens: int

    def __post_init__(self) -> None:
        if self.vocab_size <= 0:
            raise ValueError("vocab_size must be positive")
        if self.max_context_tokens <= 0:
            raise ValueError("max_context_tokens must be positive")


@dataclass(frozen=True)
class DecodingConfig:
    """Sampling knobs for autoregressive decoding.

    ``top_k=0`` disables top-k filtering and ``top_p=0`` disables nucleus
    filtering; both may be active at once.
    """

    max_new_tokens: int = 200
    temperature: float = 0.7
    top_k: int = 100
    top_p: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_new_tokens < 0:
            raise ValueError("max_new_tokens must be >= 0")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.top_k < 0:
            raise ValueError("top_k must be >= 0")
        if not 0.0 <= self.top_p <= 1.0:
            raise ValueError("top_p must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "max_new_tokens": self.max_new_tokens,
            "temperature": self.temperature,
            "top_k": self.top_k,
            "top_p": self.top_p,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecodingConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


@runtime_checkable
class TextEncoder(Protocol):
    """Maps texts to fixed-length vectors, one row per input."""

    spec: EncoderSpec

    def encode(self, texts: Sequence[str], mode: str = "query") -> np.ndarray: ...


@runtime_checkable
class PairScorer(Protocol):
    """Scores (query, passage) pairs jointly; higher means more relevant."""

    spec: EncoderSpec

    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


@runtime_checkable
class TextGenerator(Protocol):
    """Autoregressive generator exposing a tokenizer and next-token logits."""

    spec: GeneratorSpec
    eos_token_id: int
    marker_ids: dict[str, int]

    def encode_text(self, text: str) -> list[int]: ...

    def decode_tokens(self, token_ids: Sequence[int]) -> str: ...

    def next_logits(self, token_ids: Sequence[int]) -> np.ndarray: ...


@runtime_checkable
class Translator(Protocol):
    def translate(self, texts: Sequence[str], source_lang: str, target_lang: str) -> list[str]: ...


@dataclass
class TranslationBatch:
    """Outcome of a per-item tolerant translation pass."""

    texts: list[str]
    failed_indices: list[int] = field(default_factory=list)
