"""End-to-end query answering: gate -> intent -> retrieve -> rerank -> generate.

Routing is threshold-driven and strict: a query proceeds past a gate only
when its confidence strictly exceeds the threshold. Out-of-domain queries
(low intent confidence) are mined for keywords and recorded so new intent
categories can be created later. Every stage's latency is captured, and a
stage failure yields a structured error result carrying whatever partial
output earlier stages produced.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import Sequence

from agent_assist.backends.base import DecodingConfig
from agent_assist.generation.respond import GeneratedResponse, generate_response
from agent_assist.intent.classifier import (
    GateModel,
    IntentClassifier,
    IntentPrediction,
)
from agent_assist.intent.keywords import extract_ood_keywords
from agent_assist.pipeline.stores import (
    FeedbackStore,
    OODIntentStore,
    ResultSnapshot,
    new_query_id,
)
from agent_assist.retrieval.index import DenseRetriever, RankedContext
from agent_assist.retrieval.rerank import rerank

SCHEMA_VERSION = 1

ROUTE_GENERAL = "general"
ROUTE_OOD = "ood"
ROUTE_QA = "qa"

CONFIG_ENV = "NAA_CONFIG"


@dataclass(frozen=True)
class PipelineConfig:
    gate_threshold: float = 0.5
    intent_threshold: float = 0.5
    k_retrieve: int = 5
    top_n_contexts: int = 3
    general_route: str = "reject"  # "reject" | "chitchat"
    gate_model_dir: str = ""
    intent_model_dir: str = ""
    index_dir: str = ""
    encoder_checkpoint: str = "stub:encoder"
    reranker_checkpoint: str = "stub:reranker"
    generator_checkpoint: str = "stub:generator"
    chitchat_checkpoint: str = ""
    feedback_store_path: str = ""
    results_store_path: str = ""
    ood_store_path: str = ""
    ood_keyword_count: int = 5
    ood_ngram_low: int = 1
    ood_ngram_high: int = 2
    decoding: DecodingConfig = field(default_factory=DecodingConfig)

    def __post_init__(self) -> None:
        for name in ("gate_threshold", "intent_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.k_retrieve < 1:
            raise ValueError("k_retrieve must be >= 1")
        if not 1 <= self.top_n_contexts <= self.k_retrieve:
            raise ValueError("top_n_contexts must be in [1, k_retrieve]")
        if self.general_route not in ("reject", "chitchat"):
            raise ValueError("general_route must be 'reject' or 'chitchat'")

    def to_dict(self) -> dict:
        data = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "decoding"}
        data["decoding"] = self.decoding.to_dict()
        return data


def load_pipeline_config(path: str | None = None) -> PipelineConfig:
    """Load config from a JSON file; falls back to $NAA_CONFIG, then defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return PipelineConfig()
    with open(path, "r", encoding="utf-8") as handle:
        raw = json.loads(handle.read())
    decoding = DecodingConfig.from_dict(raw.pop("decoding", {}))
    known = set(PipelineConfig.__dataclass_fields__) - {"decoding"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(decoding=decoding, **raw)


@dataclass
class PipelineComponents:
    gate: GateModel | object
    intent_classifier: IntentClassifier | object
    retriever: DenseRetriever | object
    generator: object
    reranker: object | None = None
    chitchat: object | None = None
    keyword_encoder: object | None = None

    def keyword_backend(self):
        if self.keyword_encoder is not None:
            return self.keyword_encoder
        return self.intent_classifier.encoder


@dataclass
class StageError:
    stage: str
    message: str


@dataclass
class PipelineResult:
    query_id: str
    query: str
    route: str | None = None
    gate_confidence: float | None = None
    intent: IntentPrediction | None = None
    contexts: list[RankedContext] = field(default_factory=list)
    draft_response: GeneratedResponse | None = None
    ood_keywords: list[tuple[str, float]] | None = None
    ood_record_id: str | None = None
    latency_ms: dict[str, float] = field(default_factory=dict)
    error: StageError | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "query_id": self.query_id,
            "query": self.query,
            "route": self.route,
            "gate_confidence": self.gate_confidence,
            "intent": None if self.intent is None else {
                "label": self.intent.top_label,
                "confidence": self.intent.confidence,
            },
            "contexts": [c.to_dict() for c in self.contexts],
            "draft_response": None if self.draft_response is None
            else self.draft_response.text,
            "ood_keywords": None if self.ood_keywords is None
            else [[k, s] for k, s in self.ood_keywords],
            "ood_record_id": self.ood_record_id,
            "latency_ms": self.latency_ms,
            "error": None if self.error is None
            else {"stage": self.error.stage, "message": self.error.message},
        }

    def snapshot(self) -> ResultSnapshot:
        return ResultSnapshot(
            query_id=self.query_id,
            query=self.query,
            route=self.route or "error",
            draft=None if self.draft_response is None else self.draft_response.text,
            context_ids=[c.context_id for c in self.contexts],
            context_texts=[c.scoring_text for c in self.contexts],
        )


def answer_query(
    query: str,
    components: PipelineComponents,
    config: PipelineConfig,
    *,
    ood_store: OODIntentStore | None = None,
    feedback_store: FeedbackStore | None = None,
    query_id: str | None = None,
) -> PipelineResult:
    result = PipelineResult(query_id=query_id or new_query_id(), query=query)
    stage = "gate"
    clock = time.perf_counter

    def timed(name: str, fn, *args, **kwargs):
        started = clock()
        value = fn(*args, **kwargs)
        result.latency_ms[name] = (clock() - started) * 1000.0
        return value

    try:
        in_domain, confidence = timed(
            "gate", components.gate.decide, query, config.gate_threshold
        )
        result.gate_confidence = confidence
        if not in_domain:
            result.route = ROUTE_GENERAL
            if config.general_route == "chitchat" and components.chitchat is not None:
                stage = "chitchat"
                result.draft_response = timed(
                    "chitchat", generate_response,
                    query, [], components.chitchat, config.decoding,
                )
            return _finish(result, feedback_store)

        stage = "intent"
        prediction = timed("intent", components.intent_classifier.predict, query)
        result.intent = prediction
        if not prediction.confidence > config.intent_threshold:
            result.route = ROUTE_OOD
            stage = "keywords"
            keywords = timed(
                "keywords", extract_ood_keywords,
                query, components.keyword_backend(),
                config.ood_keyword_count,
                (config.ood_ngram_low, config.ood_ngram_high),
            )
            result.ood_keywords = keywords
            if ood_store is not None and keywords:
                result.ood_record_id = ood_store.record([k for k, _ in keywords], query)
            return _finish(result, feedback_store)

        result.route = ROUTE_QA
        stage = "retrieve"
        candidates = timed("retrieve", components.retriever.retrieve, query, config.k_retrieve)
        if not candidates:
            raise RuntimeError("no contexts retrieved (empty knowledge base?)")
        result.contexts = candidates

        stage = "rerank"
        if components.reranker is not None:
            result.contexts = timed(
                "rerank", rerank, query, candidates, components.reranker,
                config.top_n_contexts,
            )
        else:
            result.contexts = candidates[: config.top_n_contexts]

        stage = "generate"
        result.draft_response = timed(
            "generate", generate_response,
            query, result.contexts, components.generator, config.decoding,
        )
        return _finish(result, feedback_store)
    except Exception as exc:
        result.error = StageError(stage, str(exc))
        return _finish(result, feedback_store)


def _finish(result: PipelineResult, feedback_store: FeedbackStore | None) -> PipelineResult:
    if feedback_store is not None:
        feedback_store.register_result(result.snapshot())
    return result


def record_ood_intent(keywords: Sequence[str], query: str, store: OODIntentStore) -> str:
    """Persist a mined keyword set; identical sets merge into one record."""
    return store.record(list(keywords), query)


def load_components(config: PipelineConfig) -> PipelineComponents:
    """Load every pipeline component named by the config.

    Gate and intent classifiers come from their artifact directories, the
    retriever from the saved index plus its encoder checkpoint.
    """
    from agent_assist.backends.registry import (
        load_encoder,
        load_generator,
        load_pair_scorer,
    )
    from agent_assist.intent.classifier import load_gate
    from agent_assist.retrieval.index import EmbeddingIndex

    if not config.gate_model_dir or not config.intent_model_dir or not config.index_dir:
        raise ValueError(
            "config must set gate_model_dir, intent_model_dir, and index_dir "
            "(train and ingest first)"
        )
    gate = load_gate(config.gate_model_dir)
    intent_classifier = IntentClassifier.load(config.intent_model_dir)
    index = EmbeddingIndex.load(config.index_dir)
    encoder = load_encoder(config.encoder_checkpoint or index.encoder_checkpoint)
    retriever = DenseRetriever(encoder, index)
    reranker = load_pair_scorer(config.reranker_checkpoint) if config.reranker_checkpoint else None
    generator = load_generator(config.generator_checkpoint)
    chitchat = (load_generator(config.chitchat_checkpoint)
                if config.chitchat_checkpoint else None)
    return PipelineComponents(
        gate=gate,
        intent_classifier=intent_classifier,
        retriever=retriever,
        generator=generator,
        reranker=reranker,
        chitchat=chitchat,
    )
