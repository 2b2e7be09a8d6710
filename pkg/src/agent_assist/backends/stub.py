"""Deterministic stub backends.

These ship with the package so every pipeline path is exercisable without
model weights: embeddings are hash-seeded lookup tables, the generator is a
tiny recurrent language model with deterministically seeded weights, and the
translator is the identity. All of them are reproducible across processes
for a fixed checkpoint name, and the encoder/generator are real torch
modules so the training code paths run against them unchanged.
"""

from __future__ import annotations

import copy
import hashlib
import re
from typing import Sequence

import numpy as np
import torch
from torch import nn

from agent_assist.backends.base import EncoderSpec, GeneratorSpec

_WORD_RE = re.compile(r"[a-z0-9']+")

HASH_TABLE_SIZE = 32768

# Fixed stub vocabulary: function words plus generic customer-support terms.
_STUB_WORDS = """
the a an and or but if then else of to in on at for from with without by
about into over under between through during before after above below up
down out off again further once here there when where why how what which
who whom this that these those is are was were be been being have has had
having do does did doing will would can could shall should may might must
not no nor only own same so than too very i me my we our you your he him
his she her it its they them their am as until while against both each few
more most other some such
hi hello hey thanks thank please sorry yes okay sure help need want know
tell open close start stop find get set make take give show check see use
try call send pay ask work reset change update cancel confirm verify
activate block unlock lock order request report explain review approve
reject edit submit apply transfer withdraw deposit refund charge dispute
account card credit debit pin password balance statement payment bank
branch mortgage loan rate interest fee limit transaction transfer currency
exchange cash cheque savings chequing wire invoice bill receipt customer
agent support service question answer issue problem error status time day
week month year today tomorrow yesterday new old lost stolen expired
security fraud identity document upload download online mobile app website
login logout email phone address name number amount money dollar euro
pound minimum maximum available pending complete failed declined approved
insurance policy claim contract legal clause agreement term condition
information detail summary context knowledge base search result response
generate model system pipeline intent keyword weather forecast travel
restaurant booking flight hotel music movie game sport news story good bad
great small large long short high low fast slow easy hard safe free full
empty left right first last next previous because really just also still
already never always often sometimes item product plan option choice list
apple orange water coffee tea food lunch dinner morning evening night
"""

STUB_VOCAB_WORDS = tuple(dict.fromkeys(_STUB_WORDS.split()))

SPECIAL_TOKENS = ("<pad>", "<eos>", "<unk>", "<ctx>", "<q>", "<a>")
PAD_ID, EOS_ID, UNK_ID, CTX_ID, Q_ID, A_ID = range(len(SPECIAL_TOKENS))


def tokenize_words(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def seed_from_name(name: str, salt: str = "") -> int:
    digest = hashlib.sha256((salt + name).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _seeded_normal(shape: tuple[int, ...], seed: int, scale: float) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return (rng.standard_normal(shape) * scale).astype(np.float32)


class HashEncoder:
    """Hash-bag text encoder backed by a trainable embedding table.

    Tokens are hashed into a fixed table whose rows are seeded from the
    checkpoint name, so two processes loading the same name produce
    bit-identical embeddings. ``mode`` is accepted for contract parity but
    does not change the representation (the stub is symmetric).
    """

    def __init__(self, checkpoint_name: str, embedding_dim: int = 64,
                 max_tokens: int = 256, pooling: str = "mean"):
        self.spec = EncoderSpec(checkpoint_name, embedding_dim, max_tokens, pooling)
        table = _seeded_normal(
            (HASH_TABLE_SIZE, embedding_dim),
            seed_from_name(checkpoint_name, salt="hash-encoder:"),
            scale=1.0 / np.sqrt(embedding_dim),
        )
        self.table = nn.Embedding.from_pretrained(torch.from_numpy(table), freeze=False)

    def _token_ids(self, text: str) -> list[int]:
        tokens = tokenize_words(text)[: self.spec.max_tokens]
        return [
            int.from_bytes(hashlib.blake2b(t.encode("utf-8"), digest_size=8).digest(), "little")
            % HASH_TABLE_SIZE
            for t in tokens
        ]

    def embed_torch(self, texts: Sequence[str], mode: str = "query") -> torch.Tensor:
        """Differentiable encoding used by the fine-tuning loops."""
        rows = []
        dim = self.spec.embedding_dim
        for text in texts:
            ids = self._token_ids(text)
            if not ids:
                rows.append(self.table.weight.sum(dim=0) * 0.0)
                continue
            vecs = self.table(torch.tensor(ids, dtype=torch.long))
            rows.append(vecs[0] if self.spec.pooling == "first-token" else vecs.mean(dim=0))
        if not rows:
            return torch.zeros((0, dim))
        return torch.stack(rows)

    def encode(self, texts: Sequence[str], mode: str = "query") -> np.ndarray:
        with torch.no_grad():
            return self.embed_torch(texts, mode).numpy().astype(np.float32, copy=True)

    def torch_module(self) -> nn.Module:
        return self.table

    def clone(self) -> "HashEncoder":
        dup = HashEncoder.__new__(HashEncoder)
        dup.spec = self.spec
        dup.table = copy.deepcopy(self.table)
        return dup


class HashPairScorer:
    """Pair scorer built on a hash encoder: score = dot(q, p).

    Shared vocabulary between the two sides makes related pairs score above
    unrelated ones, which is all the stub needs to stand in for a
    cross-encoder.
    """

    def __init__(self, checkpoint_name: str, embedding_dim: int = 64, max_tokens: int = 512):
        self.spec = EncoderSpec(checkpoint_name, embedding_dim, max_tokens)
        self._encoder = HashEncoder(
            "pair-scorer:" + checkpoint_name, embedding_dim, max_tokens
        )

    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        if not pairs:
            return []
        queries = self._encoder.encode([q for q, _ in pairs])
        passages = self._encoder.encode([p for _, p in pairs])
        return [float(x) for x in np.einsum("ij,ij->i", queries, passages)]

    def score_matrix_torch(self, queries: Sequence[str], passages: Sequence[str]) -> torch.Tensor:
        """All-pairs score matrix [len(queries) x len(passages)], differentiable."""
        q = self._encoder.embed_torch(queries)
        p = self._encoder.embed_torch(passages)
        return q @ p.T

    def torch_module(self) -> nn.Module:
        return self._encoder.table

    def clone(self) -> "HashPairScorer":
        dup = HashPairScorer.__new__(HashPairScorer)
        dup.spec = self.spec
        dup._encoder = self._encoder.clone()
        return dup


class _TinyLM(nn.Module):
    """Single-layer GRU language model with LM and discrimination heads."""

    def __init__(self, vocab_size: int, hidden_size: int, seed: int):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, hidden_size)
        self.rnn = nn.GRU(hidden_size, hidden_size, batch_first=True)
        self.lm_head = nn.Linear(hidden_size, vocab_size)
        self.mc_head = nn.Linear(hidden_size, 1)
        gen = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for param in self.parameters():
                param.copy_(torch.randn(param.shape, generator=gen) * 0.08)

    def forward(self, token_ids: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        emb = self.embed(token_ids).unsqueeze(0)
        hidden, _ = self.rnn(emb)
        hidden = hidden.squeeze(0)
        return self.lm_head(hidden), hidden


class StubGenerator:
    """Deterministic tiny generator over a fixed word vocabulary.

    Doubles as the trainable generator for the multi-task fine-tuning code:
    the LM head predicts the next token and the discrimination head scores
    candidate answers.
    """

    HIDDEN_SIZE = 64

    def __init__(self, checkpoint_name: str, max_context_tokens: int = 512):
        vocab = list(SPECIAL_TOKENS) + list(STUB_VOCAB_WORDS)
        self.vocab = vocab
        self._word_to_id = {w: i for i, w in enumerate(vocab)}
        self.spec = GeneratorSpec(checkpoint_name, len(vocab), max_context_tokens)
        self.eos_token_id = EOS_ID
        self.marker_ids = {"context": CTX_ID, "question": Q_ID, "answer": A_ID}
        self.model = _TinyLM(
            len(vocab), self.HIDDEN_SIZE, seed_from_name(checkpoint_name, salt="stub-gen:") % (2**31)
        )
        self.model.eval()

    def encode_text(self, text: str) -> list[int]:
        return [self._word_to_id.get(w, UNK_ID) for w in tokenize_words(text)]

    def decode_tokens(self, token_ids: Sequence[int]) -> str:
        words = [self.vocab[i] for i in token_ids if i >= len(SPECIAL_TOKENS)]
        return " ".join(words)

    def next_logits(self, token_ids: Sequence[int]) -> np.ndarray:
        ids = list(token_ids)[-self.spec.max_context_tokens:] or [PAD_ID]
        with torch.no_grad():
            logits, _ = self.model(torch.tensor(ids, dtype=torch.long))
        return logits[-1].numpy().astype(np.float64)

    def run_tokens(self, token_ids: Sequence[int]) -> tuple[torch.Tensor, torch.Tensor]:
        """Differentiable forward pass: (lm_logits [T x V], hidden [T x H])."""
        return self.model(torch.tensor(list(token_ids), dtype=torch.long))

    def mc_logit(self, hidden_state: torch.Tensor) -> torch.Tensor:
        return self.model.mc_head(hidden_state).squeeze(-1)

    def torch_module(self) -> nn.Module:
        return self.model

    def clone(self) -> "StubGenerator":
        dup = StubGenerator.__new__(StubGenerator)
        dup.vocab = self.vocab
        dup._word_to_id = self._word_to_id
        dup.spec = self.spec
        dup.eos_token_id = self.eos_token_id
        dup.marker_ids = dict(self.marker_ids)
        dup.model = copy.deepcopy(self.model)
        return dup


class IdentityTranslator:
    """Translator stub: returns inputs unchanged for any language pair."""

    def translate(self, texts: Sequence[str], source_lang: str, target_lang: str) -> list[str]:
        return list(texts)


STUB_MANIFEST = "stub_manifest.json"
_STUB_STATE = "state.pt"


def save_stub_artifact(backend, directory) -> None:
    """Persist a (possibly fine-tuned) stub backend as a directory."""
    import json
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if isinstance(backend, HashEncoder):
        manifest = {"kind": "hash-encoder", "checkpoint_name": backend.spec.checkpoint_name,
                    "embedding_dim": backend.spec.embedding_dim,
                    "max_tokens": backend.spec.max_tokens, "pooling": backend.spec.pooling}
        state = backend.table.state_dict()
    elif isinstance(backend, HashPairScorer):
        manifest = {"kind": "hash-pair-scorer", "checkpoint_name": backend.spec.checkpoint_name,
                    "embedding_dim": backend.spec.embedding_dim,
                    "max_tokens": backend.spec.max_tokens}
        state = backend._encoder.table.state_dict()
    elif isinstance(backend, StubGenerator):
        manifest = {"kind": "stub-generator", "checkpoint_name": backend.spec.checkpoint_name,
                    "max_context_tokens": backend.spec.max_context_tokens}
        state = backend.model.state_dict()
    else:
        raise TypeError(f"cannot persist backend of type {type(backend).__name__}")
    (directory / STUB_MANIFEST).write_text(json.dumps(manifest, indent=2))
    torch.save(state, directory / _STUB_STATE)


def load_stub_artifact(directory):
    """Rebuild a stub backend saved by ``save_stub_artifact``."""
    import json
    from pathlib import Path

    directory = Path(directory)
    manifest = json.loads((directory / STUB_MANIFEST).read_text())
    state = torch.load(directory / _STUB_STATE, weights_only=True)
    kind = manifest["kind"]
    if kind == "hash-encoder":
        backend = HashEncoder(manifest["checkpoint_name"], manifest["embedding_dim"],
                              manifest["max_tokens"], manifest["pooling"])
        backend.table.load_state_dict(state)
    elif kind == "hash-pair-scorer":
        backend = HashPairScorer(manifest["checkpoint_name"], manifest["embedding_dim"],
                                 manifest["max_tokens"])
        backend._encoder.table.load_state_dict(state)
    elif kind == "stub-generator":
        backend = StubGenerator(manifest["checkpoint_name"], manifest["max_context_tokens"])
        backend.model.load_state_dict(state)
    else:
        raise ValueError(f"unknown stub artifact kind {kind!r}")
    return backend
