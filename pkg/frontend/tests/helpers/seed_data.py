"""Seed a data directory for the UI tests: one raw bag, one codebook.

Usage: python3 seed_data.py <data-dir>

The bag carries 6 s of 10 fps video and a 16 kHz PCM tone, so the
service can extract playable media and the stub transcription endpoint
has audio to answer for.  Nothing is processed here; the import flow
under test does that through the API.
"""

import struct
import sys
from pathlib import Path

import numpy as np

from rosann.annotation.storage import Codebook, CodebookCode, save_codebook
from rosann.bag import TopicSpec, write_bag
from rosann.paths import DataDirs
from rosann.rostime import TimeStamp

IMAGE_DEF = """\
std_msgs/Header header
uint32 height
uint32 width
string encoding
uint8 is_bigendian
uint32 step
uint8[] data

================================================================================
MSG: std_msgs/Header
uint32 seq
time stamp
string frame_id
"""

AUDIO_DEF = "uint8[] data\n"


def _string(s: str) -> bytes:
    raw = s.encode()
    return struct.pack("<I", len(raw)) + raw


def _image(stamp: TimeStamp, width: int, height: int, shade: int) -> bytes:
    header = struct.pack("<I", 0) + stamp.pack() + _string("cam")
    pixels = bytes((shade, 255 - shade, 64)) * (width * height)
    return (
        header
        + struct.pack("<II", height, width)
        + _string("rgb8")
        + struct.pack("<BI", 0, width * 3)
        + struct.pack("<I", len(pixels))
        + pixels
    )


def _audio(samples: np.ndarray) -> bytes:
    raw = samples.astype("<i2").tobytes()
    return struct.pack("<I", len(raw)) + raw


def main() -> None:
    dirs = DataDirs(Path(sys.argv[1])).ensure()
    frames = [
        (TimeStamp(50 + i // 10, (i % 10) * 100_000_000),
         _image(TimeStamp(50 + i // 10, (i % 10) * 100_000_000), 64, 48,
                shade=(i * 4) % 256))
        for i in range(60)
    ]
    tone = np.sin(np.linspace(0, 880 * np.pi, 16_000 * 6)) * 12_000
    chunks = [
        (TimeStamp(50 + i, 0), _audio(tone[i * 16_000:(i + 1) * 16_000]))
        for i in range(6)
    ]
    path = write_bag(
        [
            TopicSpec("/image_raw", "sensor_msgs/Image", IMAGE_DEF, frames),
            TopicSpec("/audio", "audio_common_msgs/AudioData", AUDIO_DEF, chunks),
        ],
        dirs.bags / "session.bag",
        compression="lz4",
    )
    save_codebook(Codebook("social-cues", (
        CodebookCode("smile", "visible smile"),
        CodebookCode("nod", "head nod"),
        CodebookCode("gaze-aversion", "looks away from the robot"),
    )), dirs)
    print(path)


if __name__ == "__main__":
    main()
