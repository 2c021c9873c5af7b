"""Assemble the multimodal context sent to the annotation assistant.

The context combines the user's instruction, the project's transcript
tiers, an optional codebook excerpt, and a set of video frames sampled
at a fixed rate then passed through the privacy policy.  The default
policy sends no frames at all; frames only ever leave the machine when
the caller explicitly allows them or supplies a face detector that
clears them.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from rosann.annotation.core import Codebook, Project
from rosann.errors import RosannError
from rosann.media.avi import read_avi_frame, read_avi_info
from rosann.media.pipeline import FrameIndex, MediaManifest
from rosann.paths import DataDirs

# A frame filter answers "does this frame contain a face?"
FrameFilter = Callable[[int, bytes], bool]

PRIVACY_MODES = ("deny_all_frames", "allow_all_frames", "detector")

SYSTEM_PROMPT = """\
You are an annotation assistant for recordings of human-robot interaction.
You receive an instruction, a transcript with millisecond timings, and
possibly video frames labeled with their timeline position.

When asked to annotate, reply with a single JSON array and nothing else.
Each element must be an object with exactly these fields:
  "tier":  name of the annotation tier to create or extend
  "start": interval start in seconds (decimal)
  "end":   interval end in seconds (decimal)
  "value": the annotation label or text
Intervals must lie within the observation period and must not overlap
other intervals you emit for the same tier.  If you have nothing to
annotate, reply with [].
"""


class BadPolicy(RosannError):
    code = "BAD_POLICY"


@dataclass(frozen=True, slots=True)
class PrivacyPolicy:
    mode: str = "deny_all_frames"
    detector: FrameFilter | None = None

    def __post_init__(self):
        if self.mode not in PRIVACY_MODES:
            raise BadPolicy(f"unknown privacy mode {self.mode!r}")
        if self.mode == "detector" and self.detector is None:
            raise BadPolicy("detector mode needs a detector hook")

    def admits(self, bag_time_ms: int, jpeg: bytes) -> bool:
        if self.mode == "deny_all_frames":
            return False
        if self.mode == "allow_all_frames":
            return True
        return not self.detector(bag_time_ms, jpeg)


@dataclass(frozen=True, slots=True)
class ContextFrame:
    bag_time_ms: int
    jpeg: bytes


@dataclass(frozen=True, slots=True)
class TranscriptLine:
    speaker: str
    start_ms: int
    end_ms: int
    text: str


@dataclass(frozen=True, slots=True)
class ChatContext:
    instruction: str
    transcript: tuple[TranscriptLine, ...]
    codebook_excerpt: tuple[tuple[str, str], ...]  # (code, description)
    frames: tuple[ContextFrame, ...]
    observation_ms: int

    def user_text(self) -> str:
        """The textual half of the user message."""
        parts = [
            f"Observation period: 0 to {self.observation_ms} ms.",
            f"Instruction: {self.instruction}",
        ]
        if self.codebook_excerpt:
            codes = "\n".join(
                f"  {code}: {desc}" if desc else f"  {code}"
                for code, desc in self.codebook_excerpt
            )
            parts.append(f"Codebook:\n{codes}")
        if self.transcript:
            lines = "\n".join(
                f"  [{line.start_ms}-{line.end_ms} ms] {line.speaker}: {line.text}"
                for line in self.transcript
            )
            parts.append(f"Transcript:\n{lines}")
        if self.frames:
            times = ", ".join(str(f.bag_time_ms) for f in self.frames)
            parts.append(f"Attached frames at timeline ms: {times}")
        return "\n\n".join(parts)


def sample_frame_times(observation_ms: int, frames_per_minute: float) -> list[int]:
    """Uniform sample positions: one every 60000/rate ms, starting at 0."""
    if frames_per_minute <= 0 or observation_ms <= 0:
        return []
    step = 60_000.0 / frames_per_minute
    times = []
    t = 0.0
    while t < observation_ms:
        times.append(int(t))
        t += step
    return times


def _frame_ordinal_at(index: FrameIndex, bag_ms: int) -> int:
    """Latest frame whose bag time is at or before the target."""
    pos = bisect.bisect_right(index.bag_time_ms, bag_ms) - 1
    return max(pos, 0)


def load_transcript_lines(project: Project) -> tuple[TranscriptLine, ...]:
    lines = [
        TranscriptLine(tier.name, ann.start_ms, ann.end_ms, ann.value)
        for tier in project.tiers
        if tier.kind == "transcript"
        for ann in tier.annotations
    ]
    lines.sort(key=lambda l: (l.start_ms, l.end_ms, l.speaker))
    return tuple(lines)


def build_context(
    project: Project,
    manifest: MediaManifest,
    dirs: DataDirs,
    instruction: str,
    policy: PrivacyPolicy | None = None,
    frames_per_minute: float = 6.0,
    codebooks: dict[str, Codebook] | None = None,
) -> ChatContext:
    if policy is None:
        policy = PrivacyPolicy()

    frames: list[ContextFrame] = []
    if policy.mode != "deny_all_frames" and manifest.video is not None:
        out_dir = dirs.processed_for(manifest.bag_id)
        index = FrameIndex.from_json(json.loads(
            (out_dir / manifest.video.frame_index_path).read_text()
        ))
        if index.bag_time_ms:
            info = read_avi_info(out_dir / manifest.video.path)
            chosen: dict[int, int] = {}  # ordinal -> bag ms, deduplicated
            for t in sample_frame_times(manifest.observation_ms, frames_per_minute):
                ordinal = _frame_ordinal_at(index, t)
                chosen.setdefault(ordinal, index.bag_time_ms[ordinal])
            for ordinal in sorted(chosen):
                jpeg = read_avi_frame(
                    out_dir / manifest.video.path, info, ordinal)
                bag_ms = chosen[ordinal]
                if policy.admits(bag_ms, jpeg):
                    frames.append(ContextFrame(bag_ms, jpeg))

    excerpt: list[tuple[str, str]] = []
    for name in project.codebooks_used:
        book = (codebooks or {}).get(name)
        if book is not None:
            excerpt.extend((c.code, c.description) for c in book.codes)

    return ChatContext(
        instruction=instruction,
        transcript=load_transcript_lines(project),
        codebook_excerpt=tuple(excerpt),
        frames=tuple(frames),
        observation_ms=manifest.observation_ms,
    )
