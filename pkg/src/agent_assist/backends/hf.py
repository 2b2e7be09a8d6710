"""Model-weight backends over sentence-transformers / transformers.

Imported lazily by the registry so the rest of the package works without
these libraries or any downloaded weights. Load failures surface as
``BackendUnavailableError`` with the original cause attached.
"""

from __future__ import annotations

import copy
from typing import Sequence

import numpy as np
import torch
from torch import nn

from agent_assist.backends.base import (
    BackendUnavailableError,
    EncoderSpec,
    GeneratorSpec,
)

MARKER_TOKENS = {"context": "<ctx>", "question": "<q>", "answer": "<a>"}


def _load_or_unavailable(loader, checkpoint_name: str):
    try:
        return loader()
    except Exception as exc:  # any hub/file/IO failure means "not available"
        raise BackendUnavailableError(
            f"could not load checkpoint {checkpoint_name!r}: {exc}"
        ) from exc


class SentenceEncoder:
    """Bi-encoder side: wraps a SentenceTransformer checkpoint."""

    def __init__(self, model_path: str, checkpoint_name: str | None = None):
        from sentence_transformers import SentenceTransformer

        self.model = _load_or_unavailable(
            lambda: SentenceTransformer(model_path), checkpoint_name or model_path
        )
        self.spec = EncoderSpec(
            checkpoint_name or model_path,
            int(self.model.get_sentence_embedding_dimension()),
            int(getattr(self.model, "max_seq_length", 512) or 512),
            pooling="mean",
        )

    def encode(self, texts: Sequence[str], mode: str = "query") -> np.ndarray:
        if not texts:
            return np.zeros((0, self.spec.embedding_dim), dtype=np.float32)
        out = self.model.encode(
            list(texts), convert_to_numpy=True, normalize_embeddings=False,
            show_progress_bar=False,
        )
        return np.asarray(out, dtype=np.float32)

    def embed_torch(self, texts: Sequence[str], mode: str = "query") -> torch.Tensor:
        features = self.model.tokenize(list(texts))
        features = {k: v.to(self.model.device) for k, v in features.items()}
        return self.model(features)["sentence_embedding"]

    def torch_module(self) -> nn.Module:
        return self.model

    def clone(self) -> "SentenceEncoder":
        dup = SentenceEncoder.__new__(SentenceEncoder)
        dup.model = copy.deepcopy(self.model)
        dup.spec = self.spec
        return dup


class CrossEncoderScorer:
    """Re-ranker side: wraps a sequence-pair classification checkpoint."""

    def __init__(self, model_path: str, checkpoint_name: str | None = None, max_length: int = 512):
        from sentence_transformers import CrossEncoder

        self.model = _load_or_unavailable(
            lambda: CrossEncoder(model_path, max_length=max_length),
            checkpoint_name or model_path,
        )
        self.spec = EncoderSpec(checkpoint_name or model_path, 1, max_length)

    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        if not pairs:
            return []
        scores = self.model.predict(list(pairs), convert_to_numpy=True, show_progress_bar=False)
        return [float(s) for s in np.atleast_1d(scores)]

    def score_matrix_torch(self, queries: Sequence[str], passages: Sequence[str]) -> torch.Tensor:
        """All-pairs differentiable scores; row i is query i against every passage."""
        tok = self.model.tokenizer
        inner = self.model.model
        rows = []
        for query in queries:
            batch = tok(
                [query] * len(passages), list(passages),
                padding=True, truncation=True, max_length=self.spec.max_tokens,
                return_tensors="pt",
            )
            logits = inner(**batch).logits
            rows.append(logits[:, 0] if logits.shape[-1] == 1 else logits[:, -1])
        return torch.stack(rows)

    def torch_module(self) -> nn.Module:
        return self.model.model

    def clone(self) -> "CrossEncoderScorer":
        dup = CrossEncoderScorer.__new__(CrossEncoderScorer)
        dup.model = copy.deepcopy(self.model)
        dup.spec = self.spec
        return dup


class CausalGenerator:
    """GPT-2 style causal LM with an added discrimination head.

    Marker tokens for the prompt segments are registered as additional
    special tokens; the discrimination head is a linear layer over the last
    hidden state, trained alongside the LM during multi-task fine-tuning.
    """

    def __init__(self, model_path: str, checkpoint_name: str | None = None):
        from transformers import AutoModelForCausalLM, AutoTokenizer

        name = checkpoint_name or model_path
        self.tokenizer = _load_or_unavailable(
            lambda: AutoTokenizer.from_pretrained(model_path), name
        )
        self.model = _load_or_unavailable(
            lambda: AutoModelForCausalLM.from_pretrained(model_path), name
        )
        added = self.tokenizer.add_special_tokens(
            {"additional_special_tokens": list(MARKER_TOKENS.values())}
        )
        if added:
            self.model.resize_token_embeddings(len(self.tokenizer))
        self.model.eval()
        hidden_size = self.model.config.hidden_size
        self.mc_head = nn.Linear(hidden_size, 1)
        self.eos_token_id = int(self.tokenizer.eos_token_id)
        self.marker_ids = {
            segment: int(self.tokenizer.convert_tokens_to_ids(token))
            for segment, token in MARKER_TOKENS.items()
        }
        self.spec = GeneratorSpec(
            name,
            int(len(self.tokenizer)),
            int(getattr(self.model.config, "n_positions", None)
                or getattr(self.model.config, "max_position_embeddings", 1024)),
        )

    def encode_text(self, text: str) -> list[int]:
        return self.tokenizer.encode(text, add_special_tokens=False)

    def decode_tokens(self, token_ids: Sequence[int]) -> str:
        return self.tokenizer.decode(list(token_ids), skip_special_tokens=True).strip()

    def next_logits(self, token_ids: Sequence[int]) -> np.ndarray:
        ids = torch.tensor([list(token_ids)], dtype=torch.long)
        with torch.no_grad():
            out = self.model(input_ids=ids)
        return out.logits[0, -1].numpy().astype(np.float64)

    def run_tokens(self, token_ids: Sequence[int]) -> tuple[torch.Tensor, torch.Tensor]:
        ids = torch.tensor([list(token_ids)], dtype=torch.long)
        out = self.model(input_ids=ids, output_hidden_states=True)
        return out.logits[0], out.hidden_states[-1][0]

    def mc_logit(self, hidden_state: torch.Tensor) -> torch.Tensor:
        return self.mc_head(hidden_state).squeeze(-1)

    def torch_module(self) -> nn.Module:
        return self.model

    def clone(self) -> "CausalGenerator":
        dup = CausalGenerator.__new__(CausalGenerator)
        dup.tokenizer = self.tokenizer
        dup.model = copy.deepcopy(self.model)
        dup.mc_head = copy.deepcopy(self.mc_head)
        dup.eos_token_id = self.eos_token_id
        dup.marker_ids = dict(self.marker_ids)
        dup.spec = self.spec
        return dup


class MarianTranslator:
    """Round-trip translation backend over Marian MT checkpoints.

    ``checkpoint_name`` may be a template such as
    ``Helsinki-NLP/opus-mt-{src}-{tgt}``; one model is loaded per direction
    on first use.
    """

    def __init__(self, checkpoint_template: str = "Helsinki-NLP/opus-mt-{src}-{tgt}"):
        self.template = checkpoint_template
        self._models: dict[tuple[str, str], tuple] = {}

    def _direction(self, source_lang: str, target_lang: str):
        key = (source_lang, target_lang)
        if key not in self._models:
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

            from agent_assist.backends.registry import resolve_checkpoint_path

            name = self.template.format(src=source_lang, tgt=target_lang)
            path = resolve_checkpoint_path(name)
            tok = _load_or_unavailable(lambda: AutoTokenizer.from_pretrained(path), name)
            model = _load_or_unavailable(lambda: AutoModelForSeq2SeqLM.from_pretrained(path), name)
            model.eval()
            self._models[key] = (tok, model)
        return self._models[key]

    def translate(self, texts: Sequence[str], source_lang: str, target_lang: str) -> list[str]:
        if not texts:
            return []
        tok, model = self._direction(source_lang, target_lang)
        batch = tok(list(texts), return_tensors="pt", padding=True, truncation=True)
        with torch.no_grad():
            out = model.generate(**batch, max_new_tokens=256, num_beams=1, do_sample=False)
        return [tok.decode(row, skip_special_tokens=True) for row in out]
