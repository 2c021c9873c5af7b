"""Minimal pure-Python LZ4 codec (block + frame formats).

Bag chunks compressed with lz4 use the standard LZ4 frame format (magic
0x184D2204) wrapping LZ4 block data.  This module implements just enough of
both formats to read and write such chunks without a native dependency:

* block compression uses a greedy 4-byte hash matcher,
* frames are written with independent 64 KiB blocks and a content checksum,
* frames are read with or without content size / block checksums, and
  concatenated frames are accepted.

xxHash32 is implemented here as well; the frame format needs it for the
header and content checksums.
"""

from __future__ import annotations

import struct

from rosann.errors import RosannError

FRAME_MAGIC = 0x184D2204

# Block maximum size table indexed by the BD byte's size id.
_BLOCK_MAX = {4: 64 << 10, 5: 256 << 10, 6: 1 << 20, 7: 4 << 20}

_MIN_MATCH = 4
# Per the block spec: matches must not start within the last 12 bytes and the
# final 5 bytes are always literals.
_MF_LIMIT = 12
_LAST_LITERALS = 5

_MASK32 = 0xFFFFFFFF
_XXH_P1 = 2654435761
_XXH_P2 = 2246822519
_XXH_P3 = 3266489917
_XXH_P4 = 668265263
_XXH_P5 = 374761393


class DecompressError(RosannError):
    """Compressed data is corrupt or violates the format."""

    code = "DECOMPRESS"


def _rotl32(x: int, r: int) -> int:
    return ((x << r) | (x >> (32 - r))) & _MASK32


def xxh32(data: bytes, seed: int = 0) -> int:
    """xxHash32 of ``data``. Reference algorithm, 32-bit arithmetic."""
    n = len(data)
    i = 0
    if n >= 16:
        v1 = (seed + _XXH_P1 + _XXH_P2) & _MASK32
        v2 = (seed + _XXH_P2) & _MASK32
        v3 = seed & _MASK32
        v4 = (seed - _XXH_P1) & _MASK32
        limit = n - 16
        while i <= limit:
            lanes = struct.unpack_from("<IIII", data, i)
            v1 = (_rotl32((v1 + lanes[0] * _XXH_P2) & _MASK32, 13) * _XXH_P1) & _MASK32
            v2 = (_rotl32((v2 + lanes[1] * _XXH_P2) & _MASK32, 13) * _XXH_P1) & _MASK32
            v3 = (_rotl32((v3 + lanes[2] * _XXH_P2) & _MASK32, 13) * _XXH_P1) & _MASK32
            v4 = (_rotl32((v4 + lanes[3] * _XXH_P2) & _MASK32, 13) * _XXH_P1) & _MASK32
            i += 16
        h = (_rotl32(v1, 1) + _rotl32(v2, 7) + _rotl32(v3, 12) + _rotl32(v4, 18)) & _MASK32
    else:
        h = (seed + _XXH_P5) & _MASK32
    h = (h + n) & _MASK32
    while i + 4 <= n:
        h = (h + struct.unpack_from("<I", data, i)[0] * _XXH_P3) & _MASK32
        h = (_rotl32(h, 17) * _XXH_P4) & _MASK32
        i += 4
    while i < n:
        h = (h + data[i] * _XXH_P5) & _MASK32
        h = (_rotl32(h, 11) * _XXH_P1) & _MASK32
        i += 1
    h ^= h >> 15
    h = (h * _XXH_P2) & _MASK32
    h ^= h >> 13
    h = (h * _XXH_P3) & _MASK32
    h ^= h >> 16
    return h


def _write_length(out: bytearray, length: int) -> None:
    # 255-continuation encoding for lengths that overflow a token nibble.
    length -= 15
    while length >= 255:
        out.append(255)
        length -= 255
    out.append(length)


def compress_block(src: bytes) -> bytes:
    """Compress one LZ4 block with a greedy single-entry hash table."""
    n = len(src)
    out = bytearray()
    anchor = 0
    if n >= _MF_LIMIT + 1:
        table: dict[bytes, int] = {}
        match_limit = n - _LAST_LITERALS
        scan_limit = n - _MF_LIMIT
        pos = 0
        while pos <= scan_limit:
            key = src[pos : pos + _MIN_MATCH]
            cand = table.get(key)
            table[key] = pos
            if cand is None or pos - cand > 0xFFFF:
                pos += 1
                continue
            mlen = _MIN_MATCH
            while pos + mlen < match_limit and src[cand + mlen] == src[pos + mlen]:
                mlen += 1
            lit_len = pos - anchor
            token_lit = 15 if lit_len >= 15 else lit_len
            token_match = mlen - _MIN_MATCH
            out.append((token_lit << 4) | (15 if token_match >= 15 else token_match))
            if lit_len >= 15:
                _write_length(out, lit_len)
            out += src[anchor:pos]
            out += struct.pack("<H", pos - cand)
            if token_match >= 15:
                _write_length(out, token_match)
            pos += mlen
            anchor = pos
    # Trailing literals (always at least the last 5 bytes).
    lit_len = n - anchor
    token_lit = 15 if lit_len >= 15 else lit_len
    out.append(token_lit << 4)
    if lit_len >= 15:
        _write_length(out, lit_len)
    out += src[anchor:]
    return bytes(out)


def decompress_block(src: bytes, max_size: int) -> bytes:
    """Decompress one LZ4 block; output is capped at ``max_size`` bytes."""
    out = bytearray()
    i = 0
    n = len(src)
    while True:
        if i >= n:
            raise DecompressError("lz4 block truncated before token")
        token = src[i]
        i += 1
        lit_len = token >> 4
        if lit_len == 15:
            while True:
                if i >= n:
                    raise DecompressError("lz4 block truncated in literal length")
                b = src[i]
                i += 1
                lit_len += b
                if b != 255:
                    break
        if i + lit_len > n:
            raise DecompressError("lz4 block truncated in literals")
        out += src[i : i + lit_len]
        i += lit_len
        if i == n:
            break  # last sequence carries literals only
        if len(out) > max_size:
            raise DecompressError("lz4 block exceeds declared size")
        if i + 2 > n:
            raise DecompressError("lz4 block truncated in match offset")
        offset = src[i] | (src[i + 1] << 8)
        i += 2
        if offset == 0 or offset > len(out):
            raise DecompressError(f"lz4 match offset {offset} out of window")
        match_len = token & 0x0F
        if match_len == 15:
            while True:
                if i >= n:
                    raise DecompressError("lz4 block truncated in match length")
                b = src[i]
                i += 1
                match_len += b
                if b != 255:
                    break
        match_len += _MIN_MATCH
        if len(out) + match_len > max_size:
            raise DecompressError("lz4 block exceeds declared size")
        start = len(out) - offset
        if offset >= match_len:
            out += out[start : start + match_len]
        else:
            for k in range(match_len):  # overlapping copy must go byte by byte
                out.append(out[start + k])
    if len(out) > max_size:
        raise DecompressError("lz4 block exceeds declared size")
    return bytes(out)


def compress_frame(data: bytes, *, block_size_id: int = 4) -> bytes:
    """Wrap ``data`` in a single LZ4 frame with a content checksum."""
    if block_size_id not in _BLOCK_MAX:
        raise ValueError(f"unknown block size id {block_size_id}")
    # FLG: version=01, block independence=1, content checksum=1.
    flg = 0x64
    bd = block_size_id << 4
    descriptor = bytes([flg, bd])
    out = bytearray(struct.pack("<I", FRAME_MAGIC))
    out += descriptor
    out.append((xxh32(descriptor) >> 8) & 0xFF)
    block_max = _BLOCK_MAX[block_size_id]
    for off in range(0, len(data), block_max):
        chunk = data[off : off + block_max]
        comp = compress_block(chunk)
        if len(comp) < len(chunk):
            out += struct.pack("<I", len(comp))
            out += comp
        else:
            out += struct.pack("<I", len(chunk) | 0x80000000)
            out += chunk
    out += b"\x00\x00\x00\x00"
    out += struct.pack("<I", xxh32(data))
    return bytes(out)


def _read_u32(data: bytes, off: int, what: str) -> tuple[int, int]:
    if off + 4 > len(data):
        raise DecompressError(f"lz4 frame truncated in {what}")
    return struct.unpack_from("<I", data, off)[0], off + 4


def decompress_frame(data: bytes) -> bytes:
    """Decode one or more concatenated LZ4 frames."""
    out = bytearray()
    off = 0
    if not data:
        raise DecompressError("empty lz4 stream")
    while off < len(data):
        magic, off = _read_u32(data, off, "magic")
        if magic != FRAME_MAGIC:
            raise DecompressError(f"bad lz4 frame magic 0x{magic:08X}")
        if off + 2 > len(data):
            raise DecompressError("lz4 frame truncated in descriptor")
        flg = data[off]
        bd = data[off + 1]
        if (flg >> 6) != 0b01:
            raise DecompressError(f"unsupported lz4 frame version {flg >> 6}")
        has_block_checksum = bool(flg & 0x10)
        has_content_size = bool(flg & 0x08)
        has_content_checksum = bool(flg & 0x04)
        has_dict_id = bool(flg & 0x01)
        size_id = (bd >> 4) & 0x07
        if size_id not in _BLOCK_MAX:
            raise DecompressError(f"bad lz4 block size id {size_id}")
        block_max = _BLOCK_MAX[size_id]
        desc_end = off + 2 + (8 if has_content_size else 0) + (4 if has_dict_id else 0)
        if desc_end + 1 > len(data):
            raise DecompressError("lz4 frame truncated in descriptor")
        expected_hc = (xxh32(data[off:desc_end]) >> 8) & 0xFF
        if data[desc_end] != expected_hc:
            raise DecompressError("lz4 frame header checksum mismatch")
        content_size = None
        if has_content_size:
            content_size = struct.unpack_from("<Q", data, off + 2)[0]
        off = desc_end + 1
        frame_start_len = len(out)
        while True:
            bsize, off = _read_u32(data, off, "block size")
            if bsize == 0:
                break
            is_raw = bool(bsize & 0x80000000)
            size = bsize & 0x7FFFFFFF
            if size > block_max:
                raise DecompressError(f"lz4 block size {size} exceeds maximum")
            if off + size > len(data):
                raise DecompressError("lz4 frame truncated in block data")
            block = data[off : off + size]
            off += size
            if has_block_checksum:
                bc, off = _read_u32(data, off, "block checksum")
                if bc != xxh32(block):
                    raise DecompressError("lz4 block checksum mismatch")
            out += block if is_raw else decompress_block(block, block_max)
        if has_content_checksum:
            cc, off = _read_u32(data, off, "content checksum")
            if cc != xxh32(bytes(out[frame_start_len:])):
                raise DecompressError("lz4 content checksum mismatch")
        if content_size is not None and len(out) - frame_start_len != content_size:
            raise DecompressError("lz4 content size mismatch")
    return bytes(out)
