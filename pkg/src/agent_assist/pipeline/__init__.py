from agent_assist.pipeline.core import (
    ROUTE_GENERAL,
    ROUTE_OOD,
    ROUTE_QA,
    SCHEMA_VERSION,
    PipelineComponents,
    PipelineConfig,
    PipelineResult,
    StageError,
    answer_query,
    load_components,
    load_pipeline_config,
    record_ood_intent,
)
from agent_assist.pipeline.stores import (
    FeedbackRecord,
    FeedbackStore,
    OODIntentRecord,
    OODIntentStore,
    ResultSnapshot,
    UnknownQueryError,
    export_feedback_for_training,
    new_query_id,
)

__all__ = [
    "ROUTE_GENERAL",
    "ROUTE_OOD",
    "ROUTE_QA",
    "SCHEMA_VERSION",
    "PipelineComponents",
    "PipelineConfig",
    "PipelineResult",
    "StageError",
    "answer_query",
    "load_components",
    "load_pipeline_config",
    "record_ood_intent",
    "FeedbackRecord",
    "FeedbackStore",
    "OODIntentRecord",
    "OODIntentStore",
    "ResultSnapshot",
    "UnknownQueryError",
    "export_feedback_for_training",
    "new_query_id",
]
