"""REST service wrapping the pipeline for the agent console and API clients.

Endpoints (HTTP/1.1, JSON, UTF-8):
  POST /v1/query      run the pipeline on a query
  POST /v1/feedback   record an agent verdict on an issued query id
  GET  /v1/ood-intents  mined out-of-domain intents, most frequent first
  GET  /v1/health     component load status
  GET  /v1/config     active config with filesystem paths redacted

Requests are handled concurrently; the two stores serialize their writes
internally. One structured log line is emitted per request.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from agent_assist.pipeline.core import (
    PipelineComponents,
    PipelineConfig,
    answer_query,
)
from agent_assist.pipeline.stores import (
    FeedbackRecord,
    FeedbackStore,
    OODIntentStore,
    UnknownQueryError,
)
from agent_assist.service.schemas import (
    FeedbackRequest,
    QueryRequest,
)

request_logger = logging.getLogger("agent_assist.service.requests")

REQUIRED_COMPONENTS = ("gate", "intent_classifier", "retriever", "generator")
OPTIONAL_COMPONENTS = ("reranker", "chitchat")


@dataclass
class ServiceState:
    components: PipelineComponents
    config: PipelineConfig
    feedback_store: FeedbackStore = field(default_factory=FeedbackStore)
    ood_store: OODIntentStore = field(default_factory=OODIntentStore)
    request_count: int = 0


def _redacted_config(config: PipelineConfig) -> dict:
    # Filesystem locations stay private; everything else is visible.
    return {
        key: value
        for key, value in config.to_dict().items()
        if not key.endswith(("_dir", "_path"))
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="agent-assist", version="1")
    app.state.service = state

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        request_logger.info(json.dumps({
            "method": request.method,
            "path": request.url.path,
            "status": response.status_code,
            "duration_ms": round((time.perf_counter() - started) * 1000.0, 3),
        }))
        return response

    @app.post("/v1/query")
    def handle_query(body: QueryRequest):
        if not body.query_text.strip():
            raise HTTPException(status_code=400, detail="query_text must be nonempty")
        state.request_count += 1
        result = answer_query(
            body.query_text,
            state.components,
            state.config,
            ood_store=state.ood_store,
            feedback_store=state.feedback_store,
        )
        if result.error is not None:
            return JSONResponse(
                status_code=502,
                content={
                    "detail": f"pipeline stage {result.error.stage!r} failed: "
                              f"{result.error.message}",
                    "stage": result.error.stage,
                    "partial": result.to_dict(),
                },
            )
        return result.to_dict()

    @app.post("/v1/feedback")
    def handle_feedback(body: FeedbackRequest):
        try:
            record = FeedbackRecord(
                query_id=body.query_id,
                verdict=body.verdict,
                edited_text=body.edited_text,
                agent_id=body.agent_id,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            feedback_id = state.feedback_store.record_feedback(record)
        except UnknownQueryError:
            raise HTTPException(status_code=404, detail=f"unknown query_id {body.query_id!r}")
        return {"feedback_id": feedback_id}

    @app.get("/v1/ood-intents")
    def handle_ood_list():
        return [
            {
                "record_id": r.record_id,
                "keywords": list(r.keywords),
                "example_query": r.example_query,
                "count": r.count,
                "first_seen": r.first_seen,
                "last_seen": r.last_seen,
            }
            for r in state.ood_store.records()
        ]

    @app.get("/v1/health")
    def handle_health():
        loaded = {
            name: getattr(state.components, name) is not None
            for name in REQUIRED_COMPONENTS + OPTIONAL_COMPONENTS
        }
        missing = [name for name in REQUIRED_COMPONENTS if not loaded[name]]
        return {
            "status": "ok" if not missing else "degraded",
            "components": loaded,
            "missing": missing,
        }

    @app.get("/v1/config")
    def handle_config():
        return _redacted_config(state.config)

    return app
