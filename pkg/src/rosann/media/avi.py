"""Minimal MJPEG-in-AVI container writer and frame reader.

One video stream, MJPG fourcc, idx1 index; every frame is a keyframe.
This is the narrowest slice of RIFF/AVI that standard players and
browsers accept, written with stdlib struct only.  The reader walks the
movi list directly so it also works on files with a damaged index.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

from rosann.errors import RosannError

AVIF_HASINDEX = 0x00000010
AVIIF_KEYFRAME = 0x00000010


class AviFormatError(RosannError):
    code = "AVI_FORMAT"


class AviWriter:
    """Stream JPEG frames into an AVI file; sizes backpatched on close."""

    def __init__(self, path: str | Path, width: int, height: int,
                 micro_sec_per_frame: int):
        if micro_sec_per_frame <= 0:
            raise ValueError("frame interval must be positive")
        self.path = Path(path)
        self.width = width
        self.height = height
        self.usec = micro_sec_per_frame
        self.frame_count = 0
        self._index: list[tuple[int, int]] = []  # (movi-relative offset, size)
        self._fh = open(self.path, "wb")
        self._write_headers()

    def _write_headers(self) -> None:
        fh = self._fh
        fh.write(b"RIFF\x00\x00\x00\x00AVI ")

        hdrl = bytearray()
        avih = struct.pack(
            "<IIIIIIIIII4I",
            self.usec, 0, 0, AVIF_HASINDEX,
            0,  # total frames, patched on close
            0, 1, 0, self.width, self.height, 0, 0, 0, 0,
        )
        hdrl += b"avih" + struct.pack("<I", len(avih)) + avih
        strh = struct.pack(
            "<4s4sIHHIIIIIIII4H",
            b"vids", b"MJPG", 0, 0, 0, 0,
            self.usec, 1_000_000,  # scale, rate: rate/scale = fps
            0,
            0,  # stream length in frames, patched on close
            0, 0xFFFFFFFF, 0,
            0, 0, self.width, self.height,
        )
        strf = struct.pack(
            "<IiiHH4sIiiII",
            40, self.width, self.height, 1, 24, b"MJPG",
            self.width * self.height * 3, 0, 0, 0, 0,
        )
        strl = (
            b"strh" + struct.pack("<I", len(strh)) + strh
            + b"strf" + struct.pack("<I", len(strf)) + strf
        )
        hdrl += b"LIST" + struct.pack("<I", len(strl) + 4) + b"strl" + strl
        fh.write(b"LIST" + struct.pack("<I", len(hdrl) + 4) + b"hdrl")
        fh.write(bytes(hdrl))

        self._movi_size_pos = fh.tell() + 4
        fh.write(b"LIST\x00\x00\x00\x00movi")
        self._movi_start = fh.tell() - 4  # offset of the 'movi' fourcc

    def add_frame(self, jpeg: bytes) -> int:
        """Append one frame; returns its ordinal."""
        fh = self._fh
        offset = fh.tell() - self._movi_start
        fh.write(b"00dc" + struct.pack("<I", len(jpeg)))
        fh.write(jpeg)
        if len(jpeg) % 2:
            fh.write(b"\x00")
        self._index.append((offset, len(jpeg)))
        ordinal = self.frame_count
        self.frame_count += 1
        return ordinal

    def patch_frame_interval(self, micro_sec_per_frame: int) -> None:
        """Rewrite the nominal frame interval once the real median is known."""
        if micro_sec_per_frame <= 0:
            raise ValueError("frame interval must be positive")
        self.usec = micro_sec_per_frame
        fh = self._fh
        pos = fh.tell()
        fh.seek(32)  # avih dwMicroSecPerFrame
        fh.write(struct.pack("<I", micro_sec_per_frame))
        fh.seek(32 + 56 + 12 + 8 + 20)  # strh dwScale
        fh.write(struct.pack("<I", micro_sec_per_frame))
        fh.seek(pos)

    def close(self) -> None:
        fh = self._fh
        movi_end = fh.tell()
        fh.write(b"idx1" + struct.pack("<I", 16 * len(self._index)))
        for offset, size in self._index:
            fh.write(b"00dc" + struct.pack("<III", AVIIF_KEYFRAME, offset, size))
        riff_end = fh.tell()

        fh.seek(4)
        fh.write(struct.pack("<I", riff_end - 8))
        fh.seek(self._movi_size_pos)
        fh.write(struct.pack("<I", movi_end - self._movi_start))
        # dwTotalFrames sits 16 bytes into avih payload; avih payload starts
        # after RIFF(12) + LIST hdr(12) + 'avih' + size (8) = offset 32.
        fh.seek(32 + 16)
        fh.write(struct.pack("<I", self.frame_count))
        # strh dwLength: avih is 56 bytes, then LIST strl header 12, then
        # 'strh' + size 8; dwLength is at byte 32 of the strh payload.
        strh_payload = 32 + 56 + 12 + 8
        fh.seek(strh_payload + 32)
        fh.write(struct.pack("<I", self.frame_count))
        fh.close()

    def __enter__(self) -> "AviWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass(frozen=True, slots=True)
class AviInfo:
    width: int
    height: int
    micro_sec_per_frame: int
    frame_count: int
    frame_offsets: tuple[tuple[int, int], ...]  # absolute (offset, size)


def read_avi_info(path: str | Path) -> AviInfo:
    """Parse enough of an AVI to enumerate and randomly access frames."""
    data = Path(path).read_bytes()
    if data[:4] != b"RIFF" or data[8:12] != b"AVI ":
        raise AviFormatError("not a RIFF AVI file")
    # Fixed layout for files this module writes: avih payload begins at
    # byte 32, with usec at +0 and width/height at +32/+36.
    usec, = struct.unpack_from("<I", data, 32)
    width, height = struct.unpack_from("<II", data, 32 + 32)

    # Find the movi list, then walk its chunks.
    pos = 12
    movi_start = movi_end = None
    while pos + 8 <= len(data):
        fourcc = data[pos : pos + 4]
        size, = struct.unpack_from("<I", data, pos + 4)
        if fourcc == b"LIST" and data[pos + 8 : pos + 12] == b"movi":
            movi_start = pos + 8
            movi_end = pos + 8 + size
            break
        pos += 8 + size + (size % 2)
    if movi_start is None:
        raise AviFormatError("no movi list")

    frames: list[tuple[int, int]] = []
    pos = movi_start + 4
    while pos + 8 <= min(movi_end, len(data)):
        fourcc = data[pos : pos + 4]
        size, = struct.unpack_from("<I", data, pos + 4)
        if fourcc == b"00dc":
            frames.append((pos + 8, size))
        pos += 8 + size + (size % 2)
    return AviInfo(width, height, usec, len(frames), tuple(frames))


def read_avi_frame(path: str | Path, info: AviInfo, ordinal: int) -> bytes:
    if not 0 <= ordinal < info.frame_count:
        raise IndexError(f"frame {ordinal} of {info.frame_count}")
    offset, size = info.frame_offsets[ordinal]
    with open(path, "rb") as fh:
        fh.seek(offset)
        return fh.read(size)
