"""Assemble audio message bytes into a playable PCM WAV file.

The wire gives an opaque byte stream; a per-bag format hint says how to
interpret it.  Raw PCM hints are written directly.  Compressed hints
(mp3 and friends) go through a configurable external decoder command,
since shipping a codec is out of scope; without one the bytes are stored
as-is with a .bin suffix and the manifest records the gap.
"""

from __future__ import annotations

import shutil
import subprocess
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rosann.errors import RosannError

DEFAULT_SAMPLE_RATE = 16_000
DEFAULT_CHANNELS = 1

PCM_HINTS = ("pcm_s16le", "pcm16", "wave", "wav")


class AudioWriteError(RosannError):
    code = "AUDIO_WRITE"


@dataclass(frozen=True, slots=True)
class AudioResult:
    path: Path
    sample_rate: int
    duration_ms: int
    decoded: bool  # False when bytes were stored without decoding


def write_pcm_wav(
    data: bytes,
    path: str | Path,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    channels: int = DEFAULT_CHANNELS,
) -> AudioResult:
    """Write 16-bit little-endian PCM bytes as a WAV file."""
    frame_bytes = 2 * channels
    usable = len(data) - (len(data) % frame_bytes)
    path = Path(path)
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(channels)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(data[:usable])
    frames = usable // frame_bytes
    return AudioResult(path, sample_rate, frames * 1000 // sample_rate, True)


def synth_tone_pcm(duration_ms: int, sample_rate: int = DEFAULT_SAMPLE_RATE,
                   freq_hz: float = 440.0) -> bytes:
    """Deterministic sine PCM, used by fixtures and demo scripts."""
    n = duration_ms * sample_rate // 1000
    t = np.arange(n, dtype=np.float64) / sample_rate
    samples = (np.sin(2 * np.pi * freq_hz * t) * 12000).astype("<i2")
    return samples.tobytes()


def decode_with_command(
    data: bytes,
    path: Path,
    command: list[str],
) -> AudioResult:
    """Pipe compressed audio through an external decoder to WAV.

    The command reads the compressed stream on stdin and must write a
    WAV to the path given by a trailing argument (ffmpeg-style templates
    use '{out}' which is substituted here).
    """
    argv = [arg.replace("{out}", str(path)) for arg in command]
    if shutil.which(argv[0]) is None:
        raise AudioWriteError(f"decoder command not found: {argv[0]}")
    proc = subprocess.run(
        argv, input=data, capture_output=True, timeout=300
    )
    if proc.returncode != 0 or not path.exists():
        detail = proc.stderr.decode(errors="replace")[-400:]
        raise AudioWriteError(f"decoder failed rc={proc.returncode}: {detail}")
    with wave.open(str(path), "rb") as wf:
        rate = wf.getframerate()
        duration_ms = wf.getnframes() * 1000 // rate
    return AudioResult(path, rate, duration_ms, True)


def store_undecoded(data: bytes, path: Path) -> AudioResult:
    path.write_bytes(data)
    return AudioResult(path, 0, 0, False)
