"""Bag-to-media extraction with a processed-once cache.

One call turns a bag into: an MJPEG AVI plus a frame index mapping every
frame ordinal to its bag timestamp, a PCM WAV, an optional transcript,
and a manifest tying them together.  Results land in
processed/<bag_id>/ where bag_id is a content hash of the file, so a
renamed copy of the same recording reuses its cache entry.  A second
call with the same bag bytes and config returns the stored manifest
without touching a single frame.
"""

from __future__ import annotations

import hashlib
import json
import logging
import statistics
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from rosann.bag import BagHandle, list_topics, read_messages
from rosann.errors import RosannError
from rosann.media.avi import AviWriter
from rosann.media.frames import jpeg_dimensions, to_jpeg
from rosann.media.transcribe import (
    Transcriber,
    TranscriberError,
    TranscriptSegment,
    transcribe_wav,
)
from rosann.media.wav import (
    DEFAULT_CHANNELS,
    DEFAULT_SAMPLE_RATE,
    AudioWriteError,
    PCM_HINTS,
    decode_with_command,
    store_undecoded,
    write_pcm_wav,
)
from rosann.msg.media_types import EmptyAudio, decode_audio, decode_image
from rosann.paths import DataDirs
from rosann.rostime import TimeStamp

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
VIDEO_NAME = "video.avi"
FRAME_INDEX_NAME = "frame_index.json"
AUDIO_WAV_NAME = "audio.wav"
AUDIO_RAW_NAME = "audio.bin"
TRANSCRIPT_NAME = "transcript.json"

FALLBACK_FRAME_INTERVAL_US = 33_333  # nominal 30 fps when undeterminable


class EmptyIndex(RosannError):
    code = "EMPTY_INDEX"


@dataclass(frozen=True, slots=True)
class ExtractionConfig:
    video_topic: str = "/image_raw"
    audio_topic: str = "/audio"
    audio_format_hint: str = "mp3"
    sample_rate: int = DEFAULT_SAMPLE_RATE
    channels: int = DEFAULT_CHANNELS
    jpeg_quality: int = 85
    audio_decoder_command: tuple[str, ...] | None = None
    transcribe: bool = False

    def fingerprint(self) -> str:
        """Stable hash of everything that affects extraction output."""
        blob = json.dumps({
            "video_topic": self.video_topic,
            "audio_topic": self.audio_topic,
            "audio_format_hint": self.audio_format_hint,
            "sample_rate": self.sample_rate,
            "channels": self.channels,
            "jpeg_quality": self.jpeg_quality,
            "audio_decoder_command": list(self.audio_decoder_command or ()),
            "transcribe": self.transcribe,
        }, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True, slots=True)
class FrameIndex:
    micro_sec_per_frame: int
    bag_time_ms: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "micro_sec_per_frame": self.micro_sec_per_frame,
            "bag_time_ms": list(self.bag_time_ms),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FrameIndex":
        return cls(int(obj["micro_sec_per_frame"]),
                   tuple(int(v) for v in obj["bag_time_ms"]))


def media_time_to_bag_ms(index: FrameIndex, media_ms: int) -> int:
    """Bag time of the latest frame at or before a media position."""
    if not index.bag_time_ms:
        raise EmptyIndex("frame index has no entries")
    ordinal = media_ms * 1000 // index.micro_sec_per_frame
    ordinal = max(0, min(int(ordinal), len(index.bag_time_ms) - 1))
    return index.bag_time_ms[ordinal]


@dataclass(frozen=True, slots=True)
class VideoInfo:
    path: str  # relative to the processed dir
    frame_count: int
    frame_index_path: str
    width: int
    height: int


@dataclass(frozen=True, slots=True)
class AudioInfo:
    path: str
    sample_rate: int
    duration_ms: int
    decoded: bool


@dataclass(frozen=True, slots=True)
class TranscriptInfo:
    path: str
    speakers: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class MediaManifest:
    bag_id: str
    timeline_origin: TimeStamp
    observation_ms: int
    video: VideoInfo | None
    audio: AudioInfo | None
    transcript: TranscriptInfo | None
    produced_at: float
    config_fingerprint: str
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "bag_id": self.bag_id,
            "timeline_origin": {
                "secs": self.timeline_origin.secs,
                "nsecs": self.timeline_origin.nsecs,
            },
            "observation_ms": self.observation_ms,
            "video": None if self.video is None else {
                "path": self.video.path,
                "frame_count": self.video.frame_count,
                "frame_index_path": self.video.frame_index_path,
                "width": self.video.width,
                "height": self.video.height,
            },
            "audio": None if self.audio is None else {
                "path": self.audio.path,
                "sample_rate": self.audio.sample_rate,
                "duration_ms": self.audio.duration_ms,
                "decoded": self.audio.decoded,
            },
            "transcript": None if self.transcript is None else {
                "path": self.transcript.path,
                "speakers": list(self.transcript.speakers),
            },
            "produced_at": self.produced_at,
            "config_fingerprint": self.config_fingerprint,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MediaManifest":
        video = obj.get("video")
        audio = obj.get("audio")
        transcript = obj.get("transcript")
        return cls(
            bag_id=obj["bag_id"],
            timeline_origin=TimeStamp(
                obj["timeline_origin"]["secs"], obj["timeline_origin"]["nsecs"]
            ),
            observation_ms=int(obj["observation_ms"]),
            video=None if video is None else VideoInfo(
                video["path"], int(video["frame_count"]),
                video["frame_index_path"], int(video["width"]),
                int(video["height"]),
            ),
            audio=None if audio is None else AudioInfo(
                audio["path"], int(audio["sample_rate"]),
                int(audio["duration_ms"]), bool(audio["decoded"]),
            ),
            transcript=None if transcript is None else TranscriptInfo(
                transcript["path"], tuple(transcript["speakers"]),
            ),
            produced_at=float(obj["produced_at"]),
            config_fingerprint=obj["config_fingerprint"],
            warnings=tuple(obj.get("warnings", ())),
        )


@dataclass(slots=True)
class ProcessResult:
    manifest: MediaManifest
    manifest_path: Path
    cache_hit: bool
    frames_encoded: int


def bag_content_id(path: str | Path) -> str:
    """Content hash of the bag file; stable across renames."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()[:16]


# One in-flight extraction per bag_id within this process.
_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


def _lock_for(bag_id: str) -> threading.Lock:
    with _locks_guard:
        return _locks.setdefault(bag_id, threading.Lock())


def _extract_video(
    handle: BagHandle,
    config: ExtractionConfig,
    origin_ns: int,
    out_dir: Path,
    warnings: list[str],
) -> tuple[VideoInfo | None, int]:
    writer: AviWriter | None = None
    stamps_ns: list[int] = []
    bag_times: list[int] = []
    encoded = 0
    avi_path = out_dir / VIDEO_NAME
    dims = (0, 0)
    for msg in read_messages(handle, topics=[config.video_topic]):
        conn = handle.connections[msg.conn_id]
        try:
            frame = decode_image(conn, msg.payload, record_stamp=msg.stamp)
            jpeg = to_jpeg(frame, quality=config.jpeg_quality)
        except RosannError as exc:
            # One corrupt record must not abort a long extraction.
            warnings.append(f"frame at {msg.stamp.to_ns()} dropped: {exc}")
            continue
        encoded += 1
        if writer is None:
            if frame.width and frame.height:
                dims = (frame.width, frame.height)
            else:
                dims = jpeg_dimensions(jpeg)
            writer = AviWriter(avi_path, dims[0], dims[1],
                               FALLBACK_FRAME_INTERVAL_US)
        stamp_ns = frame.stamp.to_ns()
        bag_ms = (stamp_ns - origin_ns) // 1_000_000
        if bag_ms < 0:
            warnings.append(f"frame stamp {stamp_ns} precedes origin; clamped")
            bag_ms = 0
        if bag_times and bag_ms < bag_times[-1]:
            bag_ms = bag_times[-1]  # keep the index nondecreasing
        writer.add_frame(jpeg)
        stamps_ns.append(stamp_ns)
        bag_times.append(bag_ms)
    if writer is None:
        warnings.append(f"video topic {config.video_topic!r} has no frames")
        return None, encoded

    if len(stamps_ns) > 1:
        gaps = [b - a for a, b in zip(stamps_ns, stamps_ns[1:]) if b > a]
        usec = int(statistics.median(gaps)) // 1000 if gaps else FALLBACK_FRAME_INTERVAL_US
        usec = max(usec, 1)
    else:
        usec = FALLBACK_FRAME_INTERVAL_US
    writer.patch_frame_interval(usec)
    writer.close()

    index = FrameIndex(usec, tuple(bag_times))
    index_path = out_dir / FRAME_INDEX_NAME
    index_path.write_text(json.dumps(index.to_json()))
    return VideoInfo(VIDEO_NAME, len(bag_times), FRAME_INDEX_NAME,
                     dims[0], dims[1]), encoded


def _extract_audio(
    handle: BagHandle,
    config: ExtractionConfig,
    out_dir: Path,
    warnings: list[str],
) -> AudioInfo | None:
    chunks: list[bytes] = []
    for msg in read_messages(handle, topics=[config.audio_topic]):
        conn = handle.connections[msg.conn_id]
        try:
            chunk = decode_audio(conn, msg.payload, config.audio_format_hint,
                                 record_stamp=msg.stamp)
        except EmptyAudio:
            warnings.append(f"empty audio message at {msg.stamp.to_ns()} dropped")
            continue
        except RosannError as exc:
            warnings.append(f"audio message at {msg.stamp.to_ns()} dropped: {exc}")
            continue
        chunks.append(chunk.data)
    if not chunks:
        warnings.append(f"audio topic {config.audio_topic!r} has no data")
        return None
    stream = b"".join(chunks)
    hint = config.audio_format_hint.lower()
    wav_path = out_dir / AUDIO_WAV_NAME
    if hint in PCM_HINTS:
        result = write_pcm_wav(stream, wav_path, config.sample_rate,
                               config.channels)
    elif config.audio_decoder_command:
        try:
            result = decode_with_command(stream, wav_path,
                                         list(config.audio_decoder_command))
        except AudioWriteError as exc:
            warnings.append(f"audio decode failed, bytes stored raw: {exc}")
            result = store_undecoded(stream, out_dir / AUDIO_RAW_NAME)
    else:
        warnings.append(
            f"no decoder for hint {hint!r}; audio stored undecoded"
        )
        result = store_undecoded(stream, out_dir / AUDIO_RAW_NAME)
    return AudioInfo(result.path.name, result.sample_rate,
                     result.duration_ms, result.decoded)


def _extract_transcript(
    audio: AudioInfo | None,
    transcriber: Transcriber | None,
    origin_note: str,
    out_dir: Path,
    warnings: list[str],
) -> TranscriptInfo | None:
    if transcriber is None:
        return None
    if audio is None or not audio.decoded:
        warnings.append("transcription skipped: no decoded audio")
        return None
    try:
        segments = transcribe_wav(out_dir / audio.path, transcriber)
    except TranscriberError as exc:
        warnings.append(f"transcription failed: {exc}")
        return None
    speakers: list[str] = []
    for seg in segments:
        if seg.speaker not in speakers:
            speakers.append(seg.speaker)
    path = out_dir / TRANSCRIPT_NAME
    path.write_text(json.dumps({
        "source": origin_note,
        "speakers": speakers,
        "segments": [seg.to_json() for seg in segments],
    }, indent=1))
    return TranscriptInfo(TRANSCRIPT_NAME, tuple(speakers))


def load_transcript_segments(path: Path) -> list[TranscriptSegment]:
    obj = json.loads(path.read_text())
    return [TranscriptSegment.from_json(item) for item in obj["segments"]]


def process_bag(
    handle: BagHandle,
    config: ExtractionConfig,
    dirs: DataDirs,
    transcriber: Transcriber | None = None,
) -> ProcessResult:
    """Extract media for a bag, or return the cached manifest unchanged."""
    bag_id = bag_content_id(handle.path)
    out_dir = dirs.processed_for(bag_id)
    manifest_path = out_dir / MANIFEST_NAME

    with _lock_for(bag_id):
        if manifest_path.exists():
            stored = json.loads(manifest_path.read_text())
            if stored.get("config_fingerprint") == config.fingerprint():
                return ProcessResult(
                    manifest=MediaManifest.from_json(stored),
                    manifest_path=manifest_path,
                    cache_hit=True,
                    frames_encoded=0,
                )
        out_dir.mkdir(parents=True, exist_ok=True)
        warnings: list[str] = []

        if handle.time_span is not None:
            start, end = handle.time_span
            origin = start
            observation_ms = (end.to_ns() - start.to_ns()) // 1_000_000
        else:
            origin = TimeStamp(0, 0)
            observation_ms = 0
            warnings.append("bag carries no messages")

        topics = {topic for topic, _, _, _ in list_topics(handle)}
        video = None
        frames_encoded = 0
        if config.video_topic in topics:
            video, frames_encoded = _extract_video(
                handle, config, origin.to_ns(), out_dir, warnings)
        else:
            warnings.append(f"video topic {config.video_topic!r} missing")
        audio = None
        if config.audio_topic in topics:
            audio = _extract_audio(handle, config, out_dir, warnings)
        else:
            warnings.append(f"audio topic {config.audio_topic!r} missing")
        if config.transcribe and transcriber is None:
            warnings.append("transcription requested but no transcriber configured")
        transcript = _extract_transcript(
            audio, transcriber, f"bag {bag_id}", out_dir, warnings)

        manifest = MediaManifest(
            bag_id=bag_id,
            timeline_origin=origin,
            observation_ms=observation_ms,
            video=video,
            audio=audio,
            transcript=transcript,
            produced_at=time.time(),
            config_fingerprint=config.fingerprint(),
            warnings=tuple(warnings),
        )
        tmp = manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(manifest.to_json(), indent=1))
        tmp.rename(manifest_path)
        return ProcessResult(manifest, manifest_path, False, frames_encoded)


def load_manifest(dirs: DataDirs, bag_id: str) -> MediaManifest:
    path = dirs.processed_for(bag_id) / MANIFEST_NAME
    return MediaManifest.from_json(json.loads(path.read_text()))
