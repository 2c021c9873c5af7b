"""Parse ROS1 .msg definition text into decodable schemas.

Connection records embed the full definition of their message type with all
dependent types concatenated, separated by lines of '=' characters and
introduced by ``MSG: pkg/Type`` headers.  Schemas are derived from that text
alone, never from md5sum lookup tables, so any custom message a bag carries
is decodable without code generation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from rosann.errors import RosannError

# Wire widths of fixed-size primitives (string/time/duration handled apart).
PRIMITIVE_WIDTHS = {
    "bool": 1,
    "int8": 1,
    "uint8": 1,
    "byte": 1,
    "char": 1,
    "int16": 2,
    "uint16": 2,
    "int32": 4,
    "uint32": 4,
    "int64": 8,
    "uint64": 8,
    "float32": 4,
    "float64": 8,
}

VAR_ARRAY = -1

_SEPARATOR_RE = re.compile(r"^=+$")
_MSG_HEADER_RE = re.compile(r"^MSG:\s*(\S+)\s*$")
_FIELD_RE = re.compile(r"^(\S+)\s+(.+)$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_ARRAY_RE = re.compile(r"^(.*?)\[(\d*)\]$")

# Definition injected when a bag's embedded text references std_msgs/Header
# without carrying its section (gendeps normally includes it).
_HEADER_FALLBACK = "uint32 seq\ntime stamp\nstring frame_id\n"


class SchemaSyntaxError(RosannError):
    """A definition line cannot be parsed; carries its line number."""

    code = "SCHEMA_SYNTAX"

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownNestedType(RosannError):
    """A field names a type no definition section provides."""

    code = "UNKNOWN_TYPE"


@dataclass(frozen=True, slots=True)
class FieldType:
    """Wire type of one field.

    kind is one of ``primitive``, ``string``, ``time``, ``duration``,
    ``nested``.  ``array`` is None for scalars, VAR_ARRAY for ``type[]``,
    or the fixed length for ``type[N]``.
    """

    kind: str
    primitive: str | None = None
    nested: str | None = None
    array: int | None = None

    def element(self) -> FieldType:
        """The scalar type of one array element."""
        return FieldType(self.kind, self.primitive, self.nested)


@dataclass(frozen=True, slots=True)
class MessageSchema:
    type_name: str
    fields: tuple[tuple[str, FieldType], ...]
    nested_types: dict[str, "MessageSchema"] = field(default_factory=dict)

    def min_wire_size(self) -> int:
        """Lower bound on the byte length of any message of this schema."""
        total = 0
        for _, ftype in self.fields:
            total += _min_size(ftype, self.nested_types)
        return total


def _min_size(ftype: FieldType, nested: dict[str, MessageSchema]) -> int:
    if ftype.array == VAR_ARRAY:
        return 4
    count = 1 if ftype.array is None else ftype.array
    if ftype.kind == "primitive":
        unit = PRIMITIVE_WIDTHS[ftype.primitive]
    elif ftype.kind == "string":
        unit = 4
    elif ftype.kind in ("time", "duration"):
        unit = 8
    else:
        unit = nested[ftype.nested].min_wire_size()
    return count * unit


def _split_sections(text: str) -> list[tuple[str | None, list[tuple[int, str]]]]:
    """Split concatenated definitions into (declared name, numbered lines)."""
    sections: list[tuple[str | None, list[tuple[int, str]]]] = [(None, [])]
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if _SEPARATOR_RE.match(stripped) and len(stripped) >= 3:
            sections.append((None, []))
            continue
        name_match = _MSG_HEADER_RE.match(stripped)
        if name_match and sections[-1][0] is None and not sections[-1][1]:
            sections[-1] = (name_match.group(1), sections[-1][1])
            continue
        sections[-1][1].append((line_no, raw))
    return sections


def _parse_fields(lines: list[tuple[int, str]]) -> list[tuple[str, str]]:
    """Extract (type string, field name) pairs; constants are skipped."""
    fields: list[tuple[str, str]] = []
    seen: set[str] = set()
    for line_no, raw in lines:
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        match = _FIELD_RE.match(stripped)
        if not match:
            raise SchemaSyntaxError(f"cannot parse {stripped!r}", line_no)
        type_str, rest = match.groups()
        if type_str == "string" and "=" in rest:
            continue  # string constant: value runs to end of line, '#' included
        rest = rest.split("#", 1)[0].strip()
        if "=" in rest:
            continue  # numeric constant
        if not _NAME_RE.match(rest):
            raise SchemaSyntaxError(f"bad field name {rest!r}", line_no)
        if rest in seen:
            raise SchemaSyntaxError(f"duplicate field name {rest!r}", line_no)
        seen.add(rest)
        fields.append((type_str, rest))
    return fields


def _resolve_type(
    type_str: str, current_pkg: str, section_names: list[str]
) -> FieldType:
    array: int | None = None
    arr = _ARRAY_RE.match(type_str)
    if arr:
        type_str = arr.group(1)
        array = VAR_ARRAY if arr.group(2) == "" else int(arr.group(2))
    if type_str in PRIMITIVE_WIDTHS:
        return FieldType("primitive", primitive=type_str, array=array)
    if type_str == "string":
        return FieldType("string", array=array)
    if type_str == "time":
        return FieldType("time", array=array)
    if type_str == "duration":
        return FieldType("duration", array=array)
    # Nested type: absolute, package-relative, or the Header special case.
    candidates = []
    if "/" in type_str:
        candidates.append(type_str)
    else:
        if type_str == "Header":
            candidates.append("std_msgs/Header")
        if current_pkg:
            candidates.append(f"{current_pkg}/{type_str}")
        candidates.append(type_str)
    for cand in candidates:
        if cand in section_names:
            return FieldType("nested", nested=cand, array=array)
    suffix = "/" + type_str.rsplit("/", 1)[-1]
    for name in section_names:
        if name.endswith(suffix):
            return FieldType("nested", nested=name, array=array)
    if type_str == "Header" or type_str.endswith("/Header"):
        return FieldType("nested", nested="std_msgs/Header", array=array)
    raise UnknownNestedType(f"no definition section for type {type_str!r}")


def parse_schema(definition_text: str, type_name: str) -> MessageSchema:
    """Parse a message definition (with dependent sections) into a schema."""
    sections = _split_sections(definition_text)
    raw: dict[str, list[tuple[str, str]]] = {}
    for declared, lines in sections:
        name = declared if declared is not None else type_name
        parsed = _parse_fields(lines)
        if name in raw:
            if parsed and not raw[name]:
                raw[name] = parsed  # later, fuller copy of an empty section
            continue
        raw[name] = parsed
    if "std_msgs/Header" not in raw:
        needs_header = any(
            t in ("Header", "std_msgs/Header") for fields in raw.values() for t, _ in fields
        )
        if needs_header:
            raw["std_msgs/Header"] = _parse_fields(
                [(i + 1, line) for i, line in enumerate(_HEADER_FALLBACK.splitlines())]
            )

    section_names = list(raw)
    resolved: dict[str, MessageSchema] = {}

    def build(name: str, stack: tuple[str, ...]) -> MessageSchema:
        if name in resolved:
            return resolved[name]
        if name in stack:
            raise UnknownNestedType(f"recursive type definition through {name!r}")
        pkg = name.rsplit("/", 1)[0] if "/" in name else ""
        fields: list[tuple[str, FieldType]] = []
        nested: dict[str, MessageSchema] = {}
        for type_str, field_name in raw[name]:
            ftype = _resolve_type(type_str, pkg, section_names)
            if ftype.kind == "nested":
                sub = build(ftype.nested, stack + (name,))
                nested[ftype.nested] = sub
                nested.update(sub.nested_types)
            fields.append((field_name, ftype))
        schema = MessageSchema(name, tuple(fields), nested)
        resolved[name] = schema
        return schema

    for name in section_names:
        build(name, ())
    return resolved[type_name]
