"""Checkpoint-name resolution.

Names are opaque strings. ``stub:`` prefixed names resolve to the
deterministic test backends (the rest of the name only seeds them, so
distinct stub names give distinct but reproducible models). Anything else
is resolved against ``NAA_MODEL_DIR`` first and then treated as a hub id
for the optional model-weight backends.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

from agent_assist.backends.base import BackendUnavailableError
from agent_assist.backends.stub import (
    STUB_MANIFEST,
    HashEncoder,
    HashPairScorer,
    IdentityTranslator,
    StubGenerator,
    load_stub_artifact,
)

STUB_PREFIX = "stub:"
MODEL_DIR_ENV = "NAA_MODEL_DIR"

_DIM_SUFFIX = re.compile(r"-d(\d+)$")


def model_dir() -> Path | None:
    value = os.environ.get(MODEL_DIR_ENV)
    return Path(value) if value else None


def resolve_checkpoint_path(checkpoint_name: str) -> str:
    """Local path under NAA_MODEL_DIR when present, else the name itself."""
    base = model_dir()
    if base is not None:
        candidate = base / checkpoint_name
        if candidate.exists():
            return str(candidate)
    return checkpoint_name


def _stub_dim(checkpoint_name: str, default: int) -> int:
    match = _DIM_SUFFIX.search(checkpoint_name)
    return int(match.group(1)) if match else default


def _saved_stub(checkpoint_name: str):
    path = Path(resolve_checkpoint_path(checkpoint_name))
    if path.is_dir() and (path / STUB_MANIFEST).exists():
        return load_stub_artifact(path)
    return None


def load_encoder(checkpoint_name: str):
    if checkpoint_name.startswith(STUB_PREFIX):
        return HashEncoder(checkpoint_name, embedding_dim=_stub_dim(checkpoint_name, 64))
    saved = _saved_stub(checkpoint_name)
    if saved is not None:
        return saved
    from agent_assist.backends import hf

    return hf.SentenceEncoder(resolve_checkpoint_path(checkpoint_name), checkpoint_name)


def load_pair_scorer(checkpoint_name: str):
    if checkpoint_name.startswith(STUB_PREFIX):
        return HashPairScorer(checkpoint_name, embedding_dim=_stub_dim(checkpoint_name, 64))
    saved = _saved_stub(checkpoint_name)
    if saved is not None:
        return saved
    from agent_assist.backends import hf

    return hf.CrossEncoderScorer(resolve_checkpoint_path(checkpoint_name), checkpoint_name)


def load_generator(checkpoint_name: str):
    if checkpoint_name.startswith(STUB_PREFIX):
        return StubGenerator(checkpoint_name)
    saved = _saved_stub(checkpoint_name)
    if saved is not None:
        return saved
    from agent_assist.backends import hf

    return hf.CausalGenerator(resolve_checkpoint_path(checkpoint_name), checkpoint_name)


def load_translator(checkpoint_name: str):
    if checkpoint_name.startswith(STUB_PREFIX):
        return IdentityTranslator()
    from agent_assist.backends import hf

    return hf.MarianTranslator(checkpoint_name)


def require_stub_or_available(checkpoint_name: str) -> None:
    """Fail fast with a clear message when a weight checkpoint is missing."""
    if checkpoint_name.startswith(STUB_PREFIX):
        return
    base = model_dir()
    if base is None or not (base / checkpoint_name).exists():
        raise BackendUnavailableError(
            f"checkpoint {checkpoint_name!r} not found under "
            f"{MODEL_DIR_ENV}={base}; use a 'stub:' checkpoint or provide weights"
        )
