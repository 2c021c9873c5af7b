"""Tiered annotation model, persistence, and export."""

from rosann.annotation.core import (
    Annotation,
    Codebook,
    CodebookCode,
    CodeNotInCodebook,
    DuplicateTierName,
    MIN_DURATION_MS,
    OutOfRange,
    OverlapError,
    PROJECT_VERSION,
    Project,
    Tier,
    UnknownAnnotation,
    UnknownCodebook,
    UnknownTier,
    add_annotation,
    create_tier,
    delete_annotation,
    import_transcript,
    update_annotation,
)
from rosann.annotation.storage import (
    CSV_HEADER,
    DuplicateCode,
    InvariantViolation,
    ParseError,
    SchemaVersionMismatch,
    codebook_from_json,
    codebook_to_json,
    export_csv,
    format_timestamp,
    list_codebooks,
    load_codebook,
    load_project,
    parse_timestamp,
    project_from_json,
    project_to_json,
    save_codebook,
    save_project,
)

__all__ = [
    "Annotation",
    "CSV_HEADER",
    "Codebook",
    "CodebookCode",
    "CodeNotInCodebook",
    "DuplicateCode",
    "DuplicateTierName",
    "InvariantViolation",
    "MIN_DURATION_MS",
    "OutOfRange",
    "OverlapError",
    "PROJECT_VERSION",
    "ParseError",
    "Project",
    "SchemaVersionMismatch",
    "Tier",
    "UnknownAnnotation",
    "UnknownCodebook",
    "UnknownTier",
    "add_annotation",
    "codebook_from_json",
    "codebook_to_json",
    "create_tier",
    "delete_annotation",
    "export_csv",
    "format_timestamp",
    "import_transcript",
    "list_codebooks",
    "load_codebook",
    "load_project",
    "parse_timestamp",
    "project_from_json",
    "project_to_json",
    "save_codebook",
    "save_project",
    "update_annotation",
]
