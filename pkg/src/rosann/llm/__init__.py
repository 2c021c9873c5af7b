"""LLM-assisted annotation: context building, chat client, suggestion parsing."""

from rosann.llm.client import (
    AuthError,
    ChatClient,
    ChatTranscript,
    ChatTurn,
    TransportError,
    build_request_body,
)
from rosann.llm.context import (
    BadPolicy,
    ChatContext,
    ContextFrame,
    PrivacyPolicy,
    SYSTEM_PROMPT,
    TranscriptLine,
    build_context,
    sample_frame_times,
)
from rosann.llm.suggestions import (
    ApplyReport,
    LlmSuggestion,
    NoJsonFound,
    RejectedItem,
    apply_suggestions,
    parse_suggestions,
    serialize_suggestions,
)

__all__ = [
    "ApplyReport",
    "AuthError",
    "BadPolicy",
    "ChatClient",
    "ChatContext",
    "ChatTranscript",
    "ChatTurn",
    "ContextFrame",
    "LlmSuggestion",
    "NoJsonFound",
    "PrivacyPolicy",
    "RejectedItem",
    "SYSTEM_PROMPT",
    "TranscriptLine",
    "TransportError",
    "apply_suggestions",
    "build_context",
    "build_request_body",
    "parse_suggestions",
    "sample_frame_times",
    "serialize_suggestions",
]
