"""Knowledge-grounded response generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from agent_assist.backends.base import DecodingConfig, TextGenerator
from agent_assist.generation.decoding import decode_tokens
from agent_assist.generation.prompts import PromptLayout, assemble_prompt


@dataclass
class GeneratedResponse:
    text: str
    token_count: int
    decoding: DecodingConfig
    contexts_used: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.token_count > self.decoding.max_new_tokens:
            raise ValueError("token_count exceeds max_new_tokens")


def _context_pairs(contexts: Sequence) -> list[tuple[str, str]]:
    """Normalize contexts into (id, text) pairs.

    Accepts plain strings or ranked retrieval results (anything with a
    ``passage`` payload carrying an id and text).
    """
    pairs = []
    for i, ctx in enumerate(contexts):
        if isinstance(ctx, str):
            pairs.append((f"ctx-{i}", ctx))
        else:
            payload = getattr(ctx, "passage", ctx)
            pid = getattr(payload, "passage_id", None) or getattr(payload, "pair_id", f"ctx-{i}")
            text = getattr(payload, "text", None)
            if text is None:
                text = getattr(payload, "question", "")
                answer = getattr(payload, "answer", "")
                text = f"{text} {answer}".strip()
            pairs.append((str(pid), text))
    return pairs


def generate_response(
    question: str,
    contexts: Sequence,
    generator: TextGenerator,
    decoding: DecodingConfig,
    layout: PromptLayout | None = None,
) -> GeneratedResponse:
    """Assemble the grounded prompt, decode, and detokenize."""
    layout = layout or PromptLayout()
    pairs = _context_pairs(contexts)
    prompt = assemble_prompt(question, [text for _, text in pairs], layout, generator)
    generated = decode_tokens(
        generator.next_logits,
        prompt.ids,
        decoding,
        eos_token_id=generator.eos_token_id,
        max_context_tokens=generator.spec.max_context_tokens,
    )
    return GeneratedResponse(
        text=generator.decode_tokens(generated),
        token_count=len(generated),
        decoding=decoding,
        contexts_used=[pid for pid, _ in pairs],
    )
