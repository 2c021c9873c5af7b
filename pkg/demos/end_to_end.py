"""One full pass over a synthetic recording.

Builds a small bag with a camera topic and a microphone topic, extracts
browser-ready media from it, lets the canned transcriber produce two
speaker tiers, adds a few manual codes, and prints the session's
numbers.  Everything lands under ./demo-datas (or the directory given
as the first argument) so you can poke at the files afterwards.

Run:  python3 demos/end_to_end.py [data-dir]
"""

import struct
import sys
from pathlib import Path

import numpy as np

from rosann.annotation.core import add_annotation, create_tier
from rosann.annotation.storage import (
    Codebook,
    CodebookCode,
    export_csv,
    list_codebooks,
    save_codebook,
)
from rosann.bag import TopicSpec, open_bag, write_bag
from rosann.media.pipeline import ExtractionConfig, process_bag
from rosann.media.transcribe import StubTranscriber
from rosann.paths import DataDirs
from rosann.rostime import TimeStamp
from rosann.service.store import ProjectStore
from rosann.stats import compute_all, stats_to_csv

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
    """A flat-colored rgb8 frame; enough for MJPEG extraction."""
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


def synthesize_bag(path: Path) -> Path:
    frames = [
        (TimeStamp(50 + i // 10, (i % 10) * 100_000_000),
         _image(TimeStamp(50 + i // 10, (i % 10) * 100_000_000), 64, 48,
                shade=(i * 4) % 256))
        for i in range(60)  # 6 s of video at 10 fps
    ]
    tone = (np.sin(np.linspace(0, 880 * np.pi, 16_000 * 6)) * 12_000)
    chunks = [
        (TimeStamp(50 + i, 0), _audio(tone[i * 16_000:(i + 1) * 16_000]))
        for i in range(6)
    ]
    return write_bag(
        [
            TopicSpec("/image_raw", "sensor_msgs/Image", IMAGE_DEF, frames),
            TopicSpec("/audio", "audio_common_msgs/AudioData", AUDIO_DEF, chunks),
        ],
        path,
        compression="lz4",
    )


def main() -> None:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo-datas")
    dirs = DataDirs(root).ensure()
    bag_path = synthesize_bag(dirs.bags / "demo.bag")
    print(f"wrote {bag_path} ({bag_path.stat().st_size} bytes)")

    result = process_bag(
        open_bag(bag_path),
        ExtractionConfig(audio_format_hint="pcm16", transcribe=True),
        dirs,
        transcriber=StubTranscriber(),
    )
    m = result.manifest
    print(f"extracted {m.video.frame_count} frames -> {m.video.path}, "
          f"{m.audio.duration_ms} ms of audio -> {m.audio.path}"
          f"{' (cache hit)' if result.cache_hit else ''}")

    save_codebook(Codebook("social-cues", (
        CodebookCode("smile", "visible smile"),
        CodebookCode("nod", "head nod"),
        CodebookCode("gaze-aversion", "looks away from the robot"),
    )), dirs)

    store = ProjectStore(dirs)
    project, created = store.open_or_create(m.bag_id)
    print(f"{'created' if created else 'reopened'} project with tiers: "
          f"{[t.name for t in project.tiers]}")

    books = list_codebooks(dirs)

    def annotate(p):
        create_tier(p, "cues", "codebook", "social-cues", codebooks=books)
        add_annotation(p, "cues", 400, 1900, "smile", codebooks=books)
        add_annotation(p, "cues", 2600, 3100, "nod", codebooks=books)
        add_annotation(p, "cues", 4500, 5800, "gaze-aversion", codebooks=books)
        return None

    store.mutate(m.bag_id, annotate)
    project = store.get(m.bag_id)

    overall, tiers = compute_all(project)
    print("\nsession metrics:")
    print(stats_to_csv(overall, tiers))
    print("annotation export:")
    print(export_csv(project))
    print(f"project file: {dirs.project_file(m.bag_id)}")
    print("CLI equivalents: rosann process demo.bag --audio-format pcm16; "
          f"rosann stats {m.bag_id}; rosann export-csv {m.bag_id}")


if __name__ == "__main__":
    main()
