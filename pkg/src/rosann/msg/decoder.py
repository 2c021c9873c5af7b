"""Decode ROS1 serialized message bytes against a parsed schema.

Layout rules: primitives are little-endian with no padding, strings and
variable arrays carry a uint32 length prefix, fixed arrays carry none, and
time/duration are two 4-byte words (secs then nsecs).  Every byte of the
payload must be accounted for; surplus or shortfall is an error rather than
a silent truncation, since either means the schema and payload disagree.
"""

from __future__ import annotations

import struct

from rosann.errors import RosannError
from rosann.msg.schema import (
    PRIMITIVE_WIDTHS,
    VAR_ARRAY,
    FieldType,
    MessageSchema,
)
from rosann.rostime import Duration, TimeStamp

_STRUCT_CODES = {
    "int8": "b",
    "uint8": "B",
    "byte": "b",
    "char": "B",
    "int16": "h",
    "uint16": "H",
    "int32": "i",
    "uint32": "I",
    "int64": "q",
    "uint64": "Q",
    "float32": "f",
    "float64": "d",
}


class TruncatedMessage(RosannError):
    code = "TRUNCATED_MESSAGE"


class TrailingBytes(RosannError):
    code = "TRAILING_BYTES"


class MalformedField(RosannError):
    code = "MALFORMED_FIELD"


class _Cursor:
    """Read position over one payload; all reads bounds-checked."""

    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.data):
            raise TruncatedMessage(
                f"need {n} bytes at offset {self.pos}, "
                f"only {len(self.data) - self.pos} remain"
            )
        chunk = self.data[self.pos : end]
        self.pos = end
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def _decode_scalar(cur: _Cursor, ftype: FieldType, nested: dict[str, MessageSchema]):
    if ftype.kind == "primitive":
        prim = ftype.primitive
        if prim == "bool":
            return cur.take(1)[0] != 0
        raw = cur.take(PRIMITIVE_WIDTHS[prim])
        return struct.unpack("<" + _STRUCT_CODES[prim], raw)[0]
    if ftype.kind == "string":
        length = cur.u32()
        return cur.take(length).decode("utf-8", errors="replace")
    if ftype.kind == "time":
        raw = cur.take(8)
        try:
            return TimeStamp.unpack_from(raw)
        except ValueError as exc:  # denormalized words in corrupt payloads
            raise MalformedField(str(exc)) from exc
    if ftype.kind == "duration":
        return Duration.unpack_from(cur.take(8))
    schema = nested[ftype.nested]
    return _decode_fields(cur, schema)


def _decode_array(cur: _Cursor, ftype: FieldType, nested: dict[str, MessageSchema]):
    count = ftype.array if ftype.array != VAR_ARRAY else cur.u32()
    elem = ftype.element()
    # uint8 runs come out as bytes: image and audio payloads are large and
    # per-element boxing would dominate decode time.
    if elem.kind == "primitive" and elem.primitive in ("uint8", "char"):
        return cur.take(count)
    if elem.kind == "primitive":
        width = PRIMITIVE_WIDTHS[elem.primitive]
        if elem.primitive == "bool":
            raw = cur.take(count)
            return [b != 0 for b in raw]
        raw = cur.take(count * width)
        return list(struct.unpack(f"<{count}{_STRUCT_CODES[elem.primitive]}", raw))
    # Checking the claimed count against what the buffer could possibly
    # hold rejects garbage prefixes before they turn into huge allocations.
    # Floor of one byte per element so a pathological count cannot pass the
    # check by pairing with a zero-size element schema.
    if elem.kind == "string":
        unit = 4
    elif elem.kind in ("time", "duration"):
        unit = 8
    else:
        unit = max(nested[elem.nested].min_wire_size(), 1)
    remaining = len(cur.data) - cur.pos
    if count * unit > remaining:
        raise TruncatedMessage(
            f"array claims {count} elements, only {remaining} bytes remain"
        )
    return [_decode_scalar(cur, elem, nested) for _ in range(count)]


def _decode_fields(cur: _Cursor, schema: MessageSchema) -> dict:
    out = {}
    for name, ftype in schema.fields:
        if ftype.array is not None:
            out[name] = _decode_array(cur, ftype, schema.nested_types)
        else:
            out[name] = _decode_scalar(cur, ftype, schema.nested_types)
    return out


def decode(schema: MessageSchema, payload: bytes) -> dict:
    """Decode one serialized message; every payload byte must be consumed."""
    cur = _Cursor(payload)
    out = _decode_fields(cur, schema)
    if cur.pos != len(payload):
        raise TrailingBytes(
            f"{len(payload) - cur.pos} undecoded bytes after last field"
        )
    return out
