"""Tiered annotation documents and the operations that mutate them.

A project is a set of named tiers over one recording's timeline; each
tier holds non-overlapping labeled intervals (touching endpoints are
fine, zero duration is not).  Tiers are either bound to a codebook
(values restricted to its codes), free text, or transcript tiers
produced by speech import.  Every mutation validates before touching
the document, so a project that was valid stays valid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from rosann.errors import RosannError
from rosann.media.transcribe import TranscriptSegment

log = logging.getLogger(__name__)

PROJECT_VERSION = 1
MIN_DURATION_MS = 1

TIER_KINDS = ("codebook", "free_text", "transcript")
TIER_ORIGINS = ("manual", "llm", "transcript")


class DuplicateTierName(RosannError):
    code = "DUPLICATE"


class UnknownTier(RosannError):
    code = "NOT_FOUND"


class UnknownCodebook(RosannError):
    code = "NOT_FOUND"


class UnknownAnnotation(RosannError):
    code = "NOT_FOUND"


class OverlapError(RosannError):
    code = "OVERLAP"


class CodeNotInCodebook(RosannError):
    code = "CODE_NOT_IN_CODEBOOK"


class OutOfRange(RosannError):
    code = "OUT_OF_RANGE"


@dataclass(frozen=True, slots=True)
class CodebookCode:
    code: str
    description: str = ""
    color: str = "#808080"


@dataclass(frozen=True, slots=True)
class Codebook:
    name: str
    codes: tuple[CodebookCode, ...]

    def code_values(self) -> set[str]:
        return {c.code for c in self.codes}


@dataclass(frozen=True, slots=True)
class Annotation:
    id: str
    start_ms: int
    end_ms: int
    value: str


@dataclass(slots=True)
class Tier:
    name: str
    kind: str
    codebook_ref: str | None = None
    origin: str = "manual"
    annotations: list[Annotation] = field(default_factory=list)


@dataclass(slots=True)
class Project:
    bag_id: str
    observation_ms: int
    version: int = PROJECT_VERSION
    tiers: list[Tier] = field(default_factory=list)
    codebooks_used: list[str] = field(default_factory=list)
    next_id: int = 1

    def tier(self, name: str) -> Tier:
        for tier in self.tiers:
            if tier.name == name:
                return tier
        raise UnknownTier(f"no tier named {name!r}")

    def find_annotation(self, ann_id: str) -> tuple[Tier, int]:
        for tier in self.tiers:
            for i, ann in enumerate(tier.annotations):
                if ann.id == ann_id:
                    return tier, i
        raise UnknownAnnotation(f"no annotation with id {ann_id!r}")

    def allocate_id(self) -> str:
        ann_id = f"a{self.next_id}"
        self.next_id += 1
        return ann_id


def _check_bounds(project: Project, start_ms: int, end_ms: int) -> None:
    if start_ms < 0 or end_ms > project.observation_ms:
        raise OutOfRange(
            f"({start_ms}, {end_ms}) outside [0, {project.observation_ms}]"
        )
    if end_ms - start_ms < MIN_DURATION_MS:
        raise OutOfRange(f"duration below {MIN_DURATION_MS} ms")


def _check_value(
    tier: Tier, value: str, codebooks: dict[str, Codebook] | None
) -> None:
    if tier.kind != "codebook":
        return
    book = (codebooks or {}).get(tier.codebook_ref)
    if book is None:
        raise UnknownCodebook(f"codebook {tier.codebook_ref!r} not available")
    if value not in book.code_values():
        raise CodeNotInCodebook(
            f"{value!r} is not a code in {tier.codebook_ref!r}"
        )


def _check_overlap(tier: Tier, start_ms: int, end_ms: int,
                   exclude_id: str | None = None) -> None:
    for ann in tier.annotations:
        if ann.id == exclude_id:
            continue
        if start_ms < ann.end_ms and ann.start_ms < end_ms:
            raise OverlapError(
                f"({start_ms}, {end_ms}) overlaps {ann.id} "
                f"({ann.start_ms}, {ann.end_ms}) in tier {tier.name!r}"
            )


def _insert_sorted(tier: Tier, ann: Annotation) -> None:
    pos = len(tier.annotations)
    for i, existing in enumerate(tier.annotations):
        if (ann.start_ms, ann.end_ms) < (existing.start_ms, existing.end_ms):
            pos = i
            break
    tier.annotations.insert(pos, ann)


def create_tier(
    project: Project,
    name: str,
    kind: str,
    codebook_ref: str | None = None,
    origin: str = "manual",
    codebooks: dict[str, Codebook] | None = None,
) -> Tier:
    if kind not in TIER_KINDS:
        raise OutOfRange(f"unknown tier kind {kind!r}")
    if origin not in TIER_ORIGINS:
        raise OutOfRange(f"unknown tier origin {origin!r}")
    if any(t.name == name for t in project.tiers):
        raise DuplicateTierName(f"tier {name!r} already exists")
    if kind == "codebook":
        if not codebook_ref:
            raise UnknownCodebook("codebook tier needs a codebook_ref")
        if (codebooks or {}).get(codebook_ref) is None:
            raise UnknownCodebook(f"codebook {codebook_ref!r} not available")
        if codebook_ref not in project.codebooks_used:
            project.codebooks_used.append(codebook_ref)
    elif codebook_ref:
        raise OutOfRange("codebook_ref only applies to codebook tiers")
    tier = Tier(name=name, kind=kind, codebook_ref=codebook_ref, origin=origin)
    project.tiers.append(tier)
    return tier


def add_annotation(
    project: Project,
    tier_name: str,
    start_ms: int,
    end_ms: int,
    value: str,
    codebooks: dict[str, Codebook] | None = None,
) -> Annotation:
    tier = project.tier(tier_name)
    _check_bounds(project, start_ms, end_ms)
    _check_value(tier, value, codebooks)
    _check_overlap(tier, start_ms, end_ms)
    ann = Annotation(project.allocate_id(), start_ms, end_ms, value)
    _insert_sorted(tier, ann)
    return ann


def update_annotation(
    project: Project,
    ann_id: str,
    start_ms: int | None = None,
    end_ms: int | None = None,
    value: str | None = None,
    tier_name: str | None = None,
    codebooks: dict[str, Codebook] | None = None,
) -> Annotation:
    source_tier, index = project.find_annotation(ann_id)
    old = source_tier.annotations[index]
    target = project.tier(tier_name) if tier_name else source_tier
    new = replace(
        old,
        start_ms=old.start_ms if start_ms is None else start_ms,
        end_ms=old.end_ms if end_ms is None else end_ms,
        value=old.value if value is None else value,
    )
    _check_bounds(project, new.start_ms, new.end_ms)
    _check_value(target, new.value, codebooks)
    _check_overlap(target, new.start_ms, new.end_ms, exclude_id=ann_id)
    del source_tier.annotations[index]
    _insert_sorted(target, new)
    return new


def delete_annotation(project: Project, ann_id: str) -> Annotation:
    tier, index = project.find_annotation(ann_id)
    return tier.annotations.pop(index)


def import_transcript(
    project: Project,
    segments: list[TranscriptSegment],
    replace_existing: bool = False,
) -> list[Tier]:
    """One transcript tier per speaker, utterances at their spoken intervals."""
    speakers: list[str] = []
    for seg in segments:
        if seg.speaker not in speakers:
            speakers.append(seg.speaker)
    if replace_existing:
        project.tiers = [t for t in project.tiers if t.name not in speakers]
    else:
        for speaker in speakers:
            if any(t.name == speaker for t in project.tiers):
                raise DuplicateTierName(
                    f"tier {speaker!r} already exists (pass replace)"
                )
    tiers = []
    for speaker in speakers:
        tier = create_tier(project, speaker, "transcript", origin="transcript")
        for seg in segments:
            if seg.speaker != speaker:
                continue
            start, end = seg.start_ms, seg.end_ms
            if end > project.observation_ms:
                log.warning(
                    "clamping segment %d-%d to observation end %d",
                    start, end, project.observation_ms,
                )
                end = project.observation_ms
            start = max(0, min(start, end))
            if end - start < MIN_DURATION_MS:
                log.warning("dropping segment outside observation: %r", seg)
                continue
            try:
                _check_overlap(tier, start, end)
            except OverlapError:
                log.warning("dropping segment overlapping earlier one: %r", seg)
                continue
            ann = Annotation(project.allocate_id(), start, end, seg.text)
            _insert_sorted(tier, ann)
        tiers.append(tier)
    return tiers
