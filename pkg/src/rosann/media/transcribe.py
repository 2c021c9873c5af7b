"""Speaker-attributed transcription of extracted audio.

A Transcriber turns a WAV file into raw speaker-labeled segments; this
module normalizes them: sort by start, anonymize speaker names to
"Speaker 1..N" in first-appearance order, clip same-speaker overlaps
keeping the earlier segment, and drop anything degenerate.  The HTTP
client posts audio to a configurable endpoint; a deterministic stub
serves tests and offline use.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx

from rosann.errors import RosannError

log = logging.getLogger(__name__)

ENV_HF_TOKEN = "HUGGINGFACE_AUTH_TOKEN"


class TranscriberError(RosannError):
    code = "TRANSCRIBER"

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(f"{message} (after {attempts} attempt(s))")
        self.attempts = attempts


@dataclass(frozen=True, slots=True)
class TranscriptSegment:
    speaker: str
    start_ms: int
    end_ms: int
    text: str

    def to_json(self) -> dict:
        return {
            "speaker": self.speaker,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "text": self.text,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TranscriptSegment":
        return cls(
            speaker=str(obj["speaker"]),
            start_ms=int(obj["start_ms"]),
            end_ms=int(obj["end_ms"]),
            text=str(obj["text"]),
        )


class Transcriber(Protocol):
    def transcribe(self, wav_path: Path) -> list[TranscriptSegment]: ...


def normalize_segments(raw: list[TranscriptSegment]) -> list[TranscriptSegment]:
    """Sorted, anonymized, overlap-clipped segments ready for import."""
    ordered = sorted(raw, key=lambda s: (s.start_ms, s.end_ms))
    labels: dict[str, str] = {}
    last_end: dict[str, int] = {}
    out: list[TranscriptSegment] = []
    for seg in ordered:
        if seg.speaker not in labels:
            labels[seg.speaker] = f"Speaker {len(labels) + 1}"
        label = labels[seg.speaker]
        start, end = seg.start_ms, seg.end_ms
        prev_end = last_end.get(label, 0)
        if start < prev_end:
            log.warning(
                "clipping %s segment %d-%d to %d-%d (overlaps previous)",
                label, start, end, prev_end, end,
            )
            start = prev_end
        if start >= end:
            log.warning("dropping empty segment %d-%d for %s", start, end, label)
            continue
        last_end[label] = end
        out.append(TranscriptSegment(label, start, end, seg.text))
    return out


class StubTranscriber:
    """Returns a canned script; deterministic for tests and demos."""

    def __init__(self, segments: list[TranscriptSegment] | None = None):
        if segments is None:
            segments = [
                TranscriptSegment("alice", 500, 2500, "hello robot"),
                TranscriptSegment("bob", 3000, 5000, "hi alice"),
            ]
        self.segments = segments
        self.calls = 0

    def transcribe(self, wav_path: Path) -> list[TranscriptSegment]:
        self.calls += 1
        return list(self.segments)


class HttpTranscriber:
    """POST the WAV to a transcription endpoint and map its reply.

    Expected reply: JSON list of {speaker, start, end, text} with times
    in seconds.  Authentication uses a bearer token from the environment.
    """

    def __init__(
        self,
        endpoint: str,
        token: str | None = None,
        timeout: float = 120.0,
        attempts: int = 3,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint
        self.token = token if token is not None else os.environ.get(ENV_HF_TOKEN)
        self.timeout = timeout
        self.attempts = attempts
        self._client = client

    def transcribe(self, wav_path: Path) -> list[TranscriptSegment]:
        if not self.token:
            raise TranscriberError(f"{ENV_HF_TOKEN} is not set", attempts=0)
        audio = Path(wav_path).read_bytes()
        headers = {
            "Authorization": f"Bearer {self.token}",
            "Content-Type": "audio/wav",
        }
        client = self._client or httpx.Client(timeout=self.timeout)
        owns = self._client is None
        try:
            last_error = "no attempt made"
            for attempt in range(1, self.attempts + 1):
                try:
                    resp = client.post(self.endpoint, content=audio, headers=headers)
                except httpx.HTTPError as exc:
                    last_error = str(exc)
                else:
                    if resp.status_code == 200:
                        return self._parse(resp.text)
                    if resp.status_code in (401, 403):
                        raise TranscriberError(
                            f"endpoint rejected token: HTTP {resp.status_code}",
                            attempts=attempt,
                        )
                    last_error = f"HTTP {resp.status_code}"
                if attempt < self.attempts:
                    time.sleep(min(2.0 ** (attempt - 1), 8.0))
            raise TranscriberError(last_error, attempts=self.attempts)
        finally:
            if owns:
                client.close()

    @staticmethod
    def _parse(body: str) -> list[TranscriptSegment]:
        try:
            items = json.loads(body)
        except json.JSONDecodeError as exc:
            raise TranscriberError(f"unparseable reply: {exc}") from exc
        if not isinstance(items, list):
            raise TranscriberError("reply is not a JSON list")
        segments = []
        for item in items:
            try:
                segments.append(TranscriptSegment(
                    speaker=str(item["speaker"]),
                    start_ms=round(float(item["start"]) * 1000),
                    end_ms=round(float(item["end"]) * 1000),
                    text=str(item["text"]),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise TranscriberError(f"bad segment {item!r}: {exc}") from exc
        return segments


def transcribe_wav(wav_path: Path, transcriber: Transcriber) -> list[TranscriptSegment]:
    """Run a transcriber and normalize its output."""
    return normalize_segments(transcriber.transcribe(Path(wav_path)))
