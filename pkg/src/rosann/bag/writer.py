"""Bag fixture writer.

Produces small but format-faithful v2.0 bags for tests and demos: chunked
records, per-chunk index data, chunk info summary, and a back-patched bag
header.  ``chunked=False`` packs every message into a single chunk;
``indexed=False`` leaves ``index_pos`` at zero and drops the summary section,
imitating a recording torn by power loss.

Not intended for production recording.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from rosann.bag import lz4codec
from rosann.bag.records import BAG_HEADER_RECORD_SIZE, MAGIC, RecordOp, build_header
from rosann.rostime import TimeStamp


@dataclass(slots=True)
class TopicSpec:
    """Declares one topic and its messages for :func:`write_bag`."""

    topic: str
    type_name: str
    message_definition: str
    messages: list[tuple[TimeStamp, bytes]] = field(default_factory=list)
    callerid: str | None = None


def _record(header_fields: dict[str, bytes], data: bytes) -> bytes:
    header = build_header(header_fields)
    return struct.pack("<I", len(header)) + header + struct.pack("<I", len(data)) + data


def _bag_header_record(index_pos: int, conn_count: int, chunk_count: int) -> bytes:
    header = build_header(
        {
            "op": bytes([RecordOp.BAG_HEADER]),
            "index_pos": struct.pack("<Q", index_pos),
            "conn_count": struct.pack("<I", conn_count),
            "chunk_count": struct.pack("<I", chunk_count),
        }
    )
    pad = BAG_HEADER_RECORD_SIZE - 4 - len(header) - 4
    return struct.pack("<I", len(header)) + header + struct.pack("<I", pad) + b" " * pad


def _connection_record(conn_id: int, spec: TopicSpec) -> bytes:
    inner = {
        "topic": spec.topic.encode("utf-8"),
        "type": spec.type_name.encode("utf-8"),
        "md5sum": hashlib.md5(spec.message_definition.encode("utf-8")).hexdigest().encode(),
        "message_definition": spec.message_definition.encode("utf-8"),
    }
    if spec.callerid is not None:
        inner["callerid"] = spec.callerid.encode("utf-8")
    header = {
        "op": bytes([RecordOp.CONNECTION]),
        "conn": struct.pack("<I", conn_id),
        "topic": spec.topic.encode("utf-8"),
    }
    return _record(header, build_header(inner))


def _message_record(conn_id: int, stamp: TimeStamp, payload: bytes) -> bytes:
    header = {
        "op": bytes([RecordOp.MSG_DATA]),
        "conn": struct.pack("<I", conn_id),
        "time": stamp.pack(),
    }
    return _record(header, payload)


def write_bag(
    topic_specs: Sequence[TopicSpec | tuple],
    path: str | Path,
    *,
    chunked: bool = True,
    compression: str = "none",
    indexed: bool = True,
    messages_per_chunk: int = 100,
) -> Path:
    """Write a bag holding ``topic_specs`` and return its path.

    Per-topic stamps must be nondecreasing.  Messages from all topics are
    merged into global stamp order before chunking, matching how a recorder
    interleaves subscriptions.
    """
    if compression not in ("none", "lz4"):
        raise ValueError(f"fixture writer supports none/lz4, not {compression!r}")
    path = Path(path)
    specs = [s if isinstance(s, TopicSpec) else TopicSpec(*s) for s in topic_specs]
    for spec in specs:
        stamps = [stamp for stamp, _ in spec.messages]
        if any(a > b for a, b in zip(stamps, stamps[1:])):
            raise ValueError(f"stamps for topic {spec.topic} are not nondecreasing")

    merged: list[tuple[TimeStamp, int, bytes]] = []
    for conn_id, spec in enumerate(specs):
        merged.extend((stamp, conn_id, payload) for stamp, payload in spec.messages)
    merged.sort(key=lambda item: item[0])

    if chunked and merged:
        groups = [
            merged[i : i + messages_per_chunk] for i in range(0, len(merged), messages_per_chunk)
        ]
    else:
        groups = [merged] if merged else []

    chunk_infos: list[tuple[int, TimeStamp, TimeStamp, dict[int, int]]] = []
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(_bag_header_record(0, len(specs), len(groups)))

        pending_connections = list(range(len(specs)))
        for group in groups:
            chunk_pos = fh.tell()
            inner = bytearray()
            index: dict[int, list[tuple[TimeStamp, int]]] = {}
            for conn_id in pending_connections:
                inner += _connection_record(conn_id, specs[conn_id])
            pending_connections = []
            counts: dict[int, int] = {}
            for stamp, conn_id, payload in group:
                index.setdefault(conn_id, []).append((stamp, len(inner)))
                inner += _message_record(conn_id, stamp, payload)
                counts[conn_id] = counts.get(conn_id, 0) + 1
            uncompressed = bytes(inner)
            data = lz4codec.compress_frame(uncompressed) if compression == "lz4" else uncompressed
            fh.write(
                _record(
                    {
                        "op": bytes([RecordOp.CHUNK]),
                        "compression": compression.encode("ascii"),
                        "size": struct.pack("<I", len(uncompressed)),
                    },
                    data,
                )
            )
            for conn_id, entries in sorted(index.items()):
                entry_data = b"".join(
                    stamp.pack() + struct.pack("<I", offset) for stamp, offset in entries
                )
                fh.write(
                    _record(
                        {
                            "op": bytes([RecordOp.INDEX_DATA]),
                            "ver": struct.pack("<I", 1),
                            "conn": struct.pack("<I", conn_id),
                            "count": struct.pack("<I", len(entries)),
                        },
                        entry_data,
                    )
                )
            stamps = [stamp for stamp, _, _ in group]
            chunk_infos.append((chunk_pos, min(stamps), max(stamps), counts))

        if indexed:
            index_pos = fh.tell()
            for conn_id, spec in enumerate(specs):
                fh.write(_connection_record(conn_id, spec))
            for chunk_pos, start, end, counts in chunk_infos:
                info_data = b"".join(
                    struct.pack("<II", conn_id, count) for conn_id, count in sorted(counts.items())
                )
                fh.write(
                    _record(
                        {
                            "op": bytes([RecordOp.CHUNK_INFO]),
                            "ver": struct.pack("<I", 1),
                            "chunk_pos": struct.pack("<Q", chunk_pos),
                            "start_time": start.pack(),
                            "end_time": end.pack(),
                            "count": struct.pack("<I", len(counts)),
                        },
                        info_data,
                    )
                )
            fh.seek(len(MAGIC))
            fh.write(_bag_header_record(index_pos, len(specs), len(groups)))
    return path
