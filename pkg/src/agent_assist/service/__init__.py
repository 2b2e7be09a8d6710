from agent_assist.service.app import ServiceState, create_app
from agent_assist.service.schemas import (
    QUERY_RESPONSE_SCHEMA,
    FeedbackRequest,
    QueryRequest,
)

__all__ = [
    "ServiceState",
    "create_app",
    "QUERY_RESPONSE_SCHEMA",
    "FeedbackRequest",
    "QueryRequest",
]
