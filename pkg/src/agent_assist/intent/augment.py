"""Training-data augmentation: round-trip translation and token insertion."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from agent_assist.backends.base import Translator
from agent_assist.intent.classifier import LabeledQuery, normalize_query

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentationConfig:
    pivot_lang: str = "de"
    insertion_rate: float = 0.1
    seed: int = 0
    drop_identical: bool = True
    # Augmented-to-original mix ratio applied by callers when blending sets.
    mix_ratio: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.insertion_rate <= 1.0:
            raise ValueError("insertion_rate must be in [0, 1]")
        if self.mix_ratio < 0:
            raise ValueError("mix_ratio must be >= 0")


@dataclass
class AugmentationResult:
    examples: list[LabeledQuery] = field(default_factory=list)
    skipped: int = 0


def augment_back_translation(
    examples: Sequence[LabeledQuery],
    translator: Translator,
    cfg: AugmentationConfig,
    source_lang: str = "en",
) -> AugmentationResult:
    """Paraphrase via source -> pivot -> source round trips.

    Labels are carried over from the source examples. Items the translator
    fails on are skipped and counted; round trips that reproduce the
    source text are dropped when ``drop_identical`` is set.
    """
    result = AugmentationResult()
    for example in examples:
        try:
            pivoted = translator.translate([example.text], source_lang, cfg.pivot_lang)
            back = translator.translate(pivoted, cfg.pivot_lang, source_lang)[0]
        except Exception as exc:
            result.skipped += 1
            logger.warning("back-translation failed for %r: %s", example.text[:80], exc)
            continue
        if cfg.drop_identical and normalize_query(back) == normalize_query(example.text):
            continue
        if not normalize_query(back):
            result.skipped += 1
            continue
        result.examples.append(LabeledQuery(back, example.label_index))
    return result


def augment_insertion(example: LabeledQuery, cfg: AugmentationConfig) -> LabeledQuery:
    """Insert ceil(rate * token_count) of the example's own tokens at random
    positions; deterministic for a fixed seed, label unchanged."""
    tokens = example.text.split()
    k = math.ceil(cfg.insertion_rate * len(tokens))
    if k == 0:
        return example
    rng = np.random.default_rng(cfg.seed)
    current = list(tokens)
    for _ in range(k):
        token = tokens[int(rng.integers(0, len(tokens)))]
        position = int(rng.integers(0, len(current) + 1))
        current.insert(position, token)
    return LabeledQuery(" ".join(current), example.label_index)
