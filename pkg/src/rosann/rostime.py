"""ROS wire time representations shared by the bag container and message codec."""

from __future__ import annotations

import struct
from dataclasses import dataclass

NSEC_PER_SEC = 1_000_000_000

_U32_MAX = 2**32 - 1


@dataclass(frozen=True, order=True, slots=True)
class TimeStamp:
    """A ROS timestamp: two unsigned 32-bit words (seconds, nanoseconds).

    Ordering follows field order, which matches chronological order because
    nsecs is always normalized below one second.
    """

    secs: int
    nsecs: int

    def __post_init__(self) -> None:
        if not 0 <= self.secs <= _U32_MAX:
            raise ValueError(f"secs out of u32 range: {self.secs}")
        if not 0 <= self.nsecs < NSEC_PER_SEC:
            raise ValueError(f"nsecs must be in [0, 1e9): {self.nsecs}")

    @classmethod
    def from_ns(cls, ns: int) -> TimeStamp:
        return cls(ns // NSEC_PER_SEC, ns % NSEC_PER_SEC)

    def to_ns(self) -> int:
        return self.secs * NSEC_PER_SEC + self.nsecs

    def pack(self) -> bytes:
        return struct.pack("<II", self.secs, self.nsecs)

    @classmethod
    def unpack_from(cls, data: bytes, offset: int = 0) -> TimeStamp:
        secs, nsecs = struct.unpack_from("<II", data, offset)
        return cls(secs, nsecs)


@dataclass(frozen=True, order=True, slots=True)
class Duration:
    """A ROS duration: two signed 32-bit words. May be negative."""

    secs: int
    nsecs: int

    def pack(self) -> bytes:
        return struct.pack("<ii", self.secs, self.nsecs)

    @classmethod
    def unpack_from(cls, data: bytes, offset: int = 0) -> Duration:
        secs, nsecs = struct.unpack_from("<ii", data, offset)
        return cls(secs, nsecs)
