"""Media extraction: video container, audio, transcription, cache."""

from rosann.media.avi import AviFormatError, AviWriter, read_avi_frame, read_avi_info
from rosann.media.frames import EncodeError, jpeg_dimensions, to_jpeg
from rosann.media.pipeline import (
    EmptyIndex,
    ExtractionConfig,
    FrameIndex,
    MediaManifest,
    ProcessResult,
    bag_content_id,
    load_manifest,
    load_transcript_segments,
    media_time_to_bag_ms,
    process_bag,
)
from rosann.media.transcribe import (
    HttpTranscriber,
    StubTranscriber,
    Transcriber,
    TranscriberError,
    TranscriptSegment,
    normalize_segments,
    transcribe_wav,
)
from rosann.media.wav import synth_tone_pcm, write_pcm_wav

__all__ = [
    "AviFormatError",
    "AviWriter",
    "EmptyIndex",
    "EncodeError",
    "ExtractionConfig",
    "FrameIndex",
    "HttpTranscriber",
    "MediaManifest",
    "ProcessResult",
    "StubTranscriber",
    "Transcriber",
    "TranscriberError",
    "TranscriptSegment",
    "bag_content_id",
    "jpeg_dimensions",
    "load_manifest",
    "load_transcript_segments",
    "media_time_to_bag_ms",
    "normalize_segments",
    "process_bag",
    "read_avi_frame",
    "read_avi_info",
    "synth_tone_pcm",
    "to_jpeg",
    "transcribe_wav",
    "write_pcm_wav",
]
