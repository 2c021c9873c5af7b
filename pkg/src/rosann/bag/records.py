"""Record-level structures and header codec for the ROS1 bag v2.0 container.

A bag file is the 13-byte magic line followed by records.  Every record is::

    header_len (u32 LE) | header | data_len (u32 LE) | data

where the header is a sequence of fields, each ``field_len (u32 LE)`` then
``name=value`` bytes.  The ``op`` header field identifies the record kind.
All integers are little-endian.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from rosann.errors import RosannError
from rosann.rostime import TimeStamp

MAGIC = b"#ROSBAG V2.0\n"

# The bag header record is padded with ASCII spaces to this many bytes so the
# index position can be patched in after recording.
BAG_HEADER_RECORD_SIZE = 4096


class RecordOp(IntEnum):
    MSG_DATA = 0x02
    BAG_HEADER = 0x03
    INDEX_DATA = 0x04
    CHUNK = 0x05
    CHUNK_INFO = 0x06
    CONNECTION = 0x07


class MalformedMagic(RosannError):
    """File does not begin with the v2.0 version line."""

    code = "MALFORMED_MAGIC"


class TruncatedRecord(RosannError):
    """A record ends before its declared length."""

    code = "TRUNCATED_RECORD"


def parse_header_fields(data: bytes) -> dict[str, bytes]:
    """Parse a record header (or header-formatted data) into a field map."""
    fields: dict[str, bytes] = {}
    offset = 0
    n = len(data)
    while offset < n:
        if offset + 4 > n:
            raise TruncatedRecord("header field length cut short")
        (field_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if offset + field_len > n:
            raise TruncatedRecord("header field value cut short")
        entry = data[offset : offset + field_len]
        offset += field_len
        eq = entry.find(b"=")
        if eq == -1:
            raise TruncatedRecord(f"header field without '=': {entry[:40]!r}")
        fields[entry[:eq].decode("ascii", "replace")] = entry[eq + 1 :]
    return fields


def build_header(fields: dict[str, bytes]) -> bytes:
    """Serialize a field map into record-header wire form."""
    out = bytearray()
    for name, value in fields.items():
        entry = name.encode("ascii") + b"=" + value
        out += struct.pack("<I", len(entry))
        out += entry
    return bytes(out)


@dataclass(frozen=True, slots=True)
class Connection:
    """One connection record: a numeric id bound to a topic and its type."""

    conn_id: int
    topic: str
    type_name: str
    md5sum: str
    message_definition: str
    callerid: str | None = None
    latching: bool | None = None

    @classmethod
    def from_record(cls, header: dict[str, bytes], data: bytes) -> Connection:
        (conn_id,) = struct.unpack("<I", header["conn"])
        inner = parse_header_fields(data)
        latching_raw = inner.get("latching")
        return cls(
            conn_id=conn_id,
            topic=inner.get("topic", header.get("topic", b"")).decode("utf-8"),
            type_name=inner.get("type", b"").decode("utf-8"),
            md5sum=inner.get("md5sum", b"").decode("ascii", "replace"),
            message_definition=inner.get("message_definition", b"").decode("utf-8"),
            callerid=inner.get("callerid", b"").decode("utf-8") if "callerid" in inner else None,
            latching=latching_raw == b"1" if latching_raw is not None else None,
        )


@dataclass(slots=True)
class ChunkSlot:
    """One entry of the chunk index.

    ``pos`` is the file offset of a chunk record, or of the first record of a
    bare run when ``bare_span`` is set (messages recorded outside any chunk,
    as produced by v1.2-style layouts and torn recordings).
    """

    pos: int
    start: TimeStamp
    end: TimeStamp
    counts: dict[int, int]
    bare_span: int | None = None

    @property
    def message_count(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True, slots=True)
class RawMessage:
    """A recorded message: connection id, record timestamp, payload bytes."""

    conn_id: int
    stamp: TimeStamp
    payload: bytes


@dataclass(slots=True)
class BagHandle:
    """An opened bag: connection table plus chunk index.

    Immutable once :func:`rosann.bag.reader.open_bag` returns; safe to share
    across threads.  Message iteration opens its own file cursor.
    """

    path: Path
    connections: dict[int, Connection]
    chunk_index: list[ChunkSlot] = field(default_factory=list)
    message_count: int = 0
    time_span: tuple[TimeStamp, TimeStamp] | None = None
    reindexed: bool = False

    def topics(self) -> dict[str, list[Connection]]:
        """Connections grouped by topic (duplicate connections preserved)."""
        by_topic: dict[str, list[Connection]] = {}
        for conn in self.connections.values():
            by_topic.setdefault(conn.topic, []).append(conn)
        return by_topic
