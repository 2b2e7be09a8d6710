"""Wire models and the published response schema (version 1)."""

from __future__ import annotations

from pydantic import BaseModel

SCHEMA_VERSION = 1


class QueryRequest(BaseModel):
    query_text: str
    session_id: str | None = None


class FeedbackRequest(BaseModel):
    query_id: str
    verdict: str
    edited_text: str | None = None
    agent_id: str = ""


QUERY_RESPONSE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "QueryResponse",
    "type": "object",
    "required": [
        "schema_version", "query_id", "route", "intent",
        "contexts", "draft_response", "latency_ms",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "query_id": {"type": "string", "minLength": 1},
        "route": {"enum": ["general", "ood", "qa"]},
        "gate_confidence": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "intent": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["label", "confidence"],
                    "properties": {
                        "label": {"type": "string"},
                        "confidence": {"type": "number", "minimum": 0, "maximum": 1},
                    },
                },
            ]
        },
        "contexts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["passage_id", "text", "retriever_score", "reranker_score"],
                "properties": {
                    "passage_id": {"type": "string"},
                    "text": {"type": "string"},
                    "retriever_score": {"type": "number"},
                    "reranker_score": {"type": ["number", "null"]},
                    "rank": {"type": "integer", "minimum": 1},
                },
            },
        },
        "draft_response": {"type": ["string", "null"]},
        "ood_keywords": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [{"type": "string"}, {"type": "number"}],
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
            ]
        },
        "latency_ms": {
            "type": "object",
            "additionalProperties": {"type": "number", "minimum": 0},
        },
        "error": {"type": "null"},
    },
}
