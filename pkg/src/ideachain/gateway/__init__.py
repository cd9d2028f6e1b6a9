"""Provider access, prompt catalog, response parsing, and cost accounting."""

from .client import CompletionResult, LlmGateway
from .limiter import RequestLimiter
from .parsing import SCHEMA_IDS, SCHEMAS, FieldKind, FieldSpec, ParsedFields, parse_structured
from .prompts import (
    GENERATIVE_TEMPLATES,
    TEMPLATE_IDS,
    TEMPLATE_PLACEHOLDERS,
    PromptTemplate,
    render_prompt,
)
from .provider import (
    ChatProvider,
    ChatRequest,
    ChatResponse,
    EmbeddingProvider,
    EmbeddingVector,
    HashEmbeddingProvider,
    HttpChatProvider,
    HttpEmbeddingProvider,
    ReplayChatProvider,
    ScriptedChatProvider,
)
from .usage import CostReport, UsageLog, UsageRecord, cost_report, make_usage_record

__all__ = [
    "CompletionResult",
    "LlmGateway",
    "RequestLimiter",
    "SCHEMA_IDS",
    "SCHEMAS",
    "FieldKind",
    "FieldSpec",
    "ParsedFields",
    "parse_structured",
    "GENERATIVE_TEMPLATES",
    "TEMPLATE_IDS",
    "TEMPLATE_PLACEHOLDERS",
    "PromptTemplate",
    "render_prompt",
    "ChatProvider",
    "ChatRequest",
    "ChatResponse",
    "EmbeddingProvider",
    "EmbeddingVector",
    "HashEmbeddingProvider",
    "HttpChatProvider",
    "HttpEmbeddingProvider",
    "ReplayChatProvider",
    "ScriptedChatProvider",
    "CostReport",
    "UsageLog",
    "UsageRecord",
    "cost_report",
    "make_usage_record",
]
