"""Message definition parsing and payload decoding."""

from rosann.msg.decoder import MalformedField, TrailingBytes, TruncatedMessage, decode
from rosann.msg.media_types import (
    AUDIO_TYPE_ALIASES,
    AudioChunk,
    EmptyAudio,
    ImageFrame,
    SizeMismatch,
    TypeMismatch,
    decode_audio,
    decode_image,
    schema_for,
)
from rosann.msg.schema import (
    FieldType,
    MessageSchema,
    SchemaSyntaxError,
    UnknownNestedType,
    parse_schema,
)

__all__ = [
    "AUDIO_TYPE_ALIASES",
    "AudioChunk",
    "EmptyAudio",
    "FieldType",
    "ImageFrame",
    "MalformedField",
    "MessageSchema",
    "SchemaSyntaxError",
    "SizeMismatch",
    "TrailingBytes",
    "TruncatedMessage",
    "TypeMismatch",
    "UnknownNestedType",
    "decode",
    "decode_audio",
    "decode_image",
    "parse_schema",
    "schema_for",
]
