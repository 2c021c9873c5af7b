"""Typed views over decoded image and audio messages.

Raw image payloads are kept as bytes in their wire encoding; compressed
payloads stay verbatim so the downstream JPEG path can pass them through
untouched.  Audio frames carry a caller-supplied format hint because the
wire message is an opaque byte array with no self-description.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from rosann.bag.records import Connection
from rosann.errors import RosannError
from rosann.msg.decoder import decode
from rosann.msg.schema import MessageSchema, parse_schema
from rosann.rostime import TimeStamp

log = logging.getLogger(__name__)

IMAGE_TYPES = ("sensor_msgs/Image", "sensor_msgs/CompressedImage")
AUDIO_TYPE_ALIASES = (
    "audio_common_msgs/AudioData",
    "audio_common_msgs/AudioDataStamped",
)


class SizeMismatch(RosannError):
    code = "SIZE_MISMATCH"


class TypeMismatch(RosannError):
    code = "TYPE_MISMATCH"


class EmptyAudio(RosannError):
    code = "EMPTY_AUDIO"


@dataclass(frozen=True, slots=True)
class ImageFrame:
    stamp: TimeStamp
    height: int
    width: int
    step: int
    encoding: str
    pixel_data: bytes


@dataclass(frozen=True, slots=True)
class AudioChunk:
    stamp: TimeStamp
    data: bytes
    format_hint: str


_schema_cache: dict[tuple[str, str], MessageSchema] = {}


def schema_for(conn: Connection) -> MessageSchema:
    """Parse (and cache) the schema embedded in a connection record."""
    key = (conn.type_name, conn.md5sum)
    schema = _schema_cache.get(key)
    if schema is None:
        schema = parse_schema(conn.message_definition, conn.type_name)
        _schema_cache[key] = schema
    return schema


def _header_stamp(value: dict, record_stamp: TimeStamp | None) -> TimeStamp:
    header = value.get("header")
    stamp = header.get("stamp") if isinstance(header, dict) else None
    if isinstance(stamp, TimeStamp) and stamp.to_ns() != 0:
        return stamp
    if record_stamp is not None:
        return record_stamp
    return stamp if isinstance(stamp, TimeStamp) else TimeStamp(0, 0)


def decode_image(
    conn: Connection,
    payload: bytes,
    record_stamp: TimeStamp | None = None,
) -> ImageFrame:
    """Decode one sensor image message into a frame.

    Compressed images keep their encoded bytes verbatim with height, width
    and step zeroed; the dimensions live inside the codestream.
    """
    if conn.type_name not in IMAGE_TYPES:
        raise TypeMismatch(f"not an image type: {conn.type_name!r}")
    value = decode(schema_for(conn), payload)
    stamp = _header_stamp(value, record_stamp)

    if conn.type_name == "sensor_msgs/CompressedImage":
        return ImageFrame(
            stamp=stamp,
            height=0,
            width=0,
            step=0,
            encoding=value["format"],
            pixel_data=bytes(value["data"]),
        )

    height = value["height"]
    step = value["step"]
    pixel = bytes(value["data"])
    if step * height != len(pixel):
        raise SizeMismatch(
            f"step {step} x height {height} != {len(pixel)} data bytes"
        )
    encoding = value["encoding"]
    if value["is_bigendian"]:
        if encoding == "mono16" and len(pixel) % 2 == 0:
            pixel = np.frombuffer(pixel, dtype=">u2").astype("<u2").tobytes()
        else:
            log.warning(
                "big-endian %s image passed through unswapped", encoding
            )
    return ImageFrame(
        stamp=stamp,
        height=height,
        width=value["width"],
        step=step,
        encoding=encoding,
        pixel_data=pixel,
    )


def decode_audio(
    conn: Connection,
    payload: bytes,
    format_hint: str,
    record_stamp: TimeStamp | None = None,
    aliases: tuple[str, ...] = AUDIO_TYPE_ALIASES,
) -> AudioChunk:
    """Decode one audio message; data bytes are passed through verbatim."""
    if conn.type_name not in aliases:
        raise TypeMismatch(f"not an audio type: {conn.type_name!r}")
    value = decode(schema_for(conn), payload)
    inner = value.get("audio")
    if isinstance(inner, dict):  # stamped variant nests the byte array
        data = bytes(inner["data"])
    else:
        data = bytes(value["data"])
    if not data:
        raise EmptyAudio("audio message carries zero bytes")
    return AudioChunk(
        stamp=_header_stamp(value, record_stamp),
        data=data,
        format_hint=format_hint,
    )
