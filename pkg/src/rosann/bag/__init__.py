"""ROS1 bag v2.0 container: reader, chunk index, fixture writer."""

from rosann.bag.lz4codec import DecompressError
from rosann.bag.reader import UnsupportedCompression, decompress_chunk, list_topics, open_bag, read_messages
from rosann.bag.records import (
    BagHandle,
    ChunkSlot,
    Connection,
    MalformedMagic,
    RawMessage,
    TruncatedRecord,
)
from rosann.bag.writer import TopicSpec, write_bag

__all__ = [
    "BagHandle",
    "ChunkSlot",
    "Connection",
    "DecompressError",
    "MalformedMagic",
    "RawMessage",
    "TopicSpec",
    "TruncatedRecord",
    "UnsupportedCompression",
    "decompress_chunk",
    "list_topics",
    "open_bag",
    "read_messages",
    "write_bag",
]
