"""Independent LZ4 block decoder used to cross-check the shipped codec.

Written directly from the published block format description, sharing no
code with the implementation under test: a token byte holds literal and
match length nibbles (15 means "keep adding 255-bytes"), a little-endian
u16 gives the match offset, and matches copy byte-by-byte so overlapping
copies repeat recent output.
"""

from __future__ import annotations


def oracle_decompress_block(src: bytes) -> bytes:
    out = bytearray()
    i = 0
    n = len(src)
    while i < n:
        token = src[i]
        i += 1
        lit_len = token >> 4
        if lit_len == 15:
            while True:
                b = src[i]
                i += 1
                lit_len += b
                if b != 255:
                    break
        if i + lit_len > n:
            raise ValueError("literal run past end of input")
        out += src[i : i + lit_len]
        i += lit_len
        if i == n:
            break  # final literals-only sequence
        offset = src[i] | (src[i + 1] << 8)
        i += 2
        if offset == 0 or offset > len(out):
            raise ValueError(f"bad match offset {offset}")
        match_len = (token & 0x0F) + 4
        if (token & 0x0F) == 15:
            while True:
                b = src[i]
                i += 1
                match_len += b
                if b != 255:
                    break
        pos = len(out) - offset
        for _ in range(match_len):
            out.append(out[pos])
            pos += 1
    return bytes(out)
