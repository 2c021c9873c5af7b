"""Block and frame codec checks, cross-validated by tests/oracle_lz4.py."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_lz4 import oracle_decompress_block
from rosann.bag.lz4codec import (
    DecompressError,
    compress_block,
    compress_frame,
    decompress_block,
    decompress_frame,
    xxh32,
)

# Reference digests from the xxHash project's published test vectors.
XXH32_VECTORS = [
    (b"", 0, 0x02CC5D05),
    (b"", 0x9E3779B1, 0x36B78AE7),
    (b"a", 0, 0x550D7456),
    (b"abc", 0, 0x32D153FF),
    (b"Nobody inspects the spammish repetition", 0, 0xE2293B2F),
]


@pytest.mark.parametrize("data,seed,expected", XXH32_VECTORS)
def test_xxh32_reference_vectors(data, seed, expected):
    assert xxh32(data, seed) == expected


def _corpus() -> list[bytes]:
    rng = random.Random(7)
    samples = [
        b"",
        b"x",
        b"abcd" * 64,
        b"\x00" * 1000,
        bytes(rng.randrange(256) for _ in range(333)),  # incompressible
        bytes(rng.choice(b"abcde") for _ in range(5000)),
        b"header" + bytes(range(256)) * 40 + b"footer",
    ]
    # Record-shaped data: repeated keys with varying numeric tails.
    samples.append(b"".join(b"topic=/cam value=%d;" % i for i in range(800)))
    return samples


@pytest.mark.parametrize("data", _corpus())
def test_block_roundtrip_and_oracle(data):
    packed = compress_block(data)
    assert decompress_block(packed, len(data)) == data
    assert oracle_decompress_block(packed) == data


def test_block_respects_max_size():
    packed = compress_block(b"a" * 500)
    with pytest.raises(DecompressError):
        decompress_block(packed, 499)


def test_frame_roundtrip_multi_block():
    # Smallest block size id forces several blocks in one frame.
    data = bytes(range(256)) * 2048  # 512 KiB
    framed = compress_frame(data, block_size_id=4)
    assert decompress_frame(framed) == data


def test_concatenated_frames_decode_as_one_stream():
    a, b = b"first" * 100, b"second" * 100
    assert decompress_frame(compress_frame(a) + compress_frame(b)) == a + b


def test_content_checksum_detects_corruption():
    framed = bytearray(compress_frame(b"payload" * 50))
    framed[len(framed) // 2] ^= 0xFF
    with pytest.raises(DecompressError):
        decompress_frame(bytes(framed))


def test_truncated_frame_rejected():
    framed = compress_frame(b"payload" * 50)
    for cut in (1, 5, len(framed) // 2, len(framed) - 1):
        with pytest.raises(DecompressError):
            decompress_frame(framed[:cut])


def test_garbage_magic_rejected():
    with pytest.raises(DecompressError):
        decompress_frame(b"\x00\x01\x02\x03" + b"rest")
    with pytest.raises(DecompressError):
        decompress_frame(b"")


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=4000))
def test_frame_roundtrip_property(data):
    assert decompress_frame(compress_frame(data)) == data


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=4000))
def test_block_oracle_property(data):
    assert oracle_decompress_block(compress_block(data)) == data
