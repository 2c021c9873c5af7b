"""AVI and WAV container output, verified by hand-parsing the bytes."""

import io
import struct
import sys
import wave

import pytest
from PIL import Image

from rosann.media.avi import (
    AviFormatError,
    AviWriter,
    read_avi_frame,
    read_avi_info,
)
from rosann.media.wav import (
    AudioWriteError,
    decode_with_command,
    store_undecoded,
    synth_tone_pcm,
    write_pcm_wav,
)


def _jpeg(width: int, height: int, shade: int) -> bytes:
    buf = io.BytesIO()
    Image.new("RGB", (width, height), (shade, shade, shade)).save(buf, "JPEG")
    return buf.getvalue()


def test_avi_roundtrip_and_index(tmp_path):
    path = tmp_path / "clip.avi"
    frames = [_jpeg(32, 24, s) for s in (0, 85, 170)]
    with AviWriter(path, 32, 24, 40_000) as writer:
        for f in frames:
            assert writer.add_frame(f) == frames.index(f)

    info = read_avi_info(path)
    assert (info.width, info.height) == (32, 24)
    assert info.micro_sec_per_frame == 40_000
    assert info.frame_count == 3
    for i, original in enumerate(frames):
        assert read_avi_frame(path, info, i) == original
    with pytest.raises(IndexError):
        read_avi_frame(path, info, 3)


def test_avi_structure_by_hand(tmp_path):
    """Walk the RIFF tree with struct only; no package reader involved."""
    path = tmp_path / "struct.avi"
    odd = _jpeg(8, 8, 40)
    if len(odd) % 2 == 0:
        odd += b"\xff"  # force the odd-length padding path
    with AviWriter(path, 8, 8, 33_333) as writer:
        writer.add_frame(odd)
        writer.add_frame(_jpeg(8, 8, 200))

    data = path.read_bytes()
    assert data[:4] == b"RIFF" and data[8:12] == b"AVI "
    riff_size, = struct.unpack_from("<I", data, 4)
    assert riff_size == len(data) - 8

    assert data[12:16] == b"LIST" and data[20:24] == b"hdrl"
    assert data[24:28] == b"avih"
    usec, = struct.unpack_from("<I", data, 32)
    assert usec == 33_333
    total_frames, = struct.unpack_from("<I", data, 32 + 16)
    assert total_frames == 2

    # idx1 sits after the movi list; every entry must point at its chunk.
    idx = data.rindex(b"idx1")
    count = struct.unpack_from("<I", data, idx + 4)[0] // 16
    assert count == 2
    movi = data.index(b"movi")
    for i in range(count):
        entry = idx + 8 + 16 * i
        fourcc, flags, offset, size = struct.unpack_from("<4sIII", data, entry)
        assert fourcc == b"00dc"
        assert flags & 0x10  # keyframe
        chunk_at = movi + offset
        assert chunk_at % 2 == 0  # chunks stay word-aligned via padding
        assert data[chunk_at : chunk_at + 4] == b"00dc"
        assert struct.unpack_from("<I", data, chunk_at + 4)[0] == size


def test_avi_interval_patch(tmp_path):
    path = tmp_path / "patched.avi"
    with AviWriter(path, 8, 8, 99_999) as writer:
        writer.add_frame(_jpeg(8, 8, 10))
        writer.patch_frame_interval(20_000)
    data = path.read_bytes()
    assert struct.unpack_from("<I", data, 32)[0] == 20_000
    scale, rate = struct.unpack_from("<II", data, 32 + 56 + 12 + 8 + 20)
    assert (scale, rate) == (20_000, 1_000_000)
    assert read_avi_info(path).micro_sec_per_frame == 20_000


def test_not_an_avi(tmp_path):
    bad = tmp_path / "bad.avi"
    bad.write_bytes(b"RIFX" + b"\x00" * 100)
    with pytest.raises(AviFormatError):
        read_avi_info(bad)


def test_pcm_wav_verified_by_stdlib(tmp_path):
    pcm = synth_tone_pcm(500, sample_rate=8000)
    result = write_pcm_wav(pcm, tmp_path / "tone.wav", 8000, 1)
    assert result.duration_ms == 500
    assert result.decoded
    with wave.open(str(result.path), "rb") as wf:
        assert wf.getnchannels() == 1
        assert wf.getsampwidth() == 2
        assert wf.getframerate() == 8000
        assert wf.readframes(wf.getnframes()) == pcm


def test_pcm_trimmed_to_frame_multiple(tmp_path):
    result = write_pcm_wav(b"\x01\x02\x03", tmp_path / "odd.wav", 1000, 1)
    with wave.open(str(result.path), "rb") as wf:
        assert wf.getnframes() == 1
        assert wf.readframes(1) == b"\x01\x02"


def test_synth_tone_deterministic():
    a = synth_tone_pcm(100)
    assert a == synth_tone_pcm(100)
    assert len(a) == 2 * (100 * 16_000 // 1000)


_FAKE_DECODER = (
    "import sys, wave; data = sys.stdin.buffer.read();"
    "w = wave.open(sys.argv[1], 'wb'); w.setnchannels(1);"
    "w.setsampwidth(2); w.setframerate(4000);"
    "w.writeframes(data); w.close()"
)


def test_decode_with_command_happy_path(tmp_path):
    out = tmp_path / "decoded.wav"
    pcm = synth_tone_pcm(250, sample_rate=4000)
    result = decode_with_command(
        pcm, out, [sys.executable, "-c", _FAKE_DECODER, "{out}"]
    )
    assert result.decoded and result.sample_rate == 4000
    assert result.duration_ms == 250
    with wave.open(str(out), "rb") as wf:
        assert wf.readframes(wf.getnframes()) == pcm


def test_decode_with_command_failures(tmp_path):
    with pytest.raises(AudioWriteError, match="not found"):
        decode_with_command(b"x", tmp_path / "o.wav", ["no-such-decoder-xyz", "{out}"])
    with pytest.raises(AudioWriteError, match="rc=3"):
        decode_with_command(
            b"x", tmp_path / "o.wav",
            [sys.executable, "-c", "import sys; sys.exit(3)", "{out}"],
        )


def test_store_undecoded(tmp_path):
    result = store_undecoded(b"\x00\x01", tmp_path / "audio.bin")
    assert not result.decoded
    assert result.duration_ms == 0
    assert (tmp_path / "audio.bin").read_bytes() == b"\x00\x01"
