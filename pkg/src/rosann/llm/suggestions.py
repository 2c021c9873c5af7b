"""Turn assistant replies into validated annotations.

The assistant is instructed to answer with a JSON array of
{tier, start, end, value} objects, times in seconds.  Real replies wrap
that array in prose or code fences, so extraction scans for the first
parseable array.  Validation clamps times into the observation window
and rejects anything degenerate, with a reason per rejected item;
applying the survivors goes through the ordinary annotation operations
so no tier invariant can be bypassed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from rosann.annotation.core import (
    OutOfRange,
    OverlapError,
    Project,
    add_annotation,
    create_tier,
)
from rosann.errors import RosannError

_FENCE_RE = re.compile(r"```(?:[A-Za-z0-9_-]*)\s*\n?(.*?)```", re.DOTALL)


class NoJsonFound(RosannError):
    code = "NO_JSON"


@dataclass(frozen=True, slots=True)
class LlmSuggestion:
    tier_name: str
    start_ms: int
    end_ms: int
    value: str

    def to_json(self) -> dict:
        return {
            "tier": self.tier_name,
            "start": self.start_ms,
            "end": self.end_ms,
            "value": self.value,
        }


@dataclass(frozen=True, slots=True)
class RejectedItem:
    item: object
    reason: str


@dataclass(slots=True)
class ApplyReport:
    created_tiers: list[str] = field(default_factory=list)
    applied: int = 0
    rejected: list[RejectedItem] = field(default_factory=list)


def _candidate_arrays(text: str):
    for match in _FENCE_RE.finditer(text):
        yield match.group(1)
    yield text


def _first_json_array(text: str) -> list | None:
    decoder = json.JSONDecoder()
    for candidate in _candidate_arrays(text):
        pos = candidate.find("[")
        while pos != -1:
            try:
                value, _ = decoder.raw_decode(candidate, pos)
            except json.JSONDecodeError:
                pos = candidate.find("[", pos + 1)
                continue
            if isinstance(value, list):
                return value
            pos = candidate.find("[", pos + 1)
    return None


def _time_to_ms(raw) -> int | None:
    """Seconds when decimal, milliseconds when integral; None otherwise."""
    if isinstance(raw, bool):
        return None
    if isinstance(raw, float):
        return round(raw * 1000)
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        text = raw.strip()
        try:
            if "." in text:
                return round(float(text) * 1000)
            return int(text)
        except ValueError:
            return None
    return None


def parse_suggestions(
    response: str, observation_ms: int
) -> tuple[list[LlmSuggestion], list[RejectedItem]]:
    items = _first_json_array(response)
    if items is None:
        raise NoJsonFound("no JSON array in response")
    suggestions: list[LlmSuggestion] = []
    rejected: list[RejectedItem] = []
    for item in items:
        if not isinstance(item, dict):
            rejected.append(RejectedItem(item, "not an object"))
            continue
        missing = [k for k in ("tier", "start", "end", "value") if k not in item]
        if missing:
            rejected.append(RejectedItem(item, f"missing field(s): {', '.join(missing)}"))
            continue
        tier = str(item["tier"]).strip()
        if not tier:
            rejected.append(RejectedItem(item, "empty tier name"))
            continue
        start = _time_to_ms(item["start"])
        end = _time_to_ms(item["end"])
        if start is None or end is None:
            rejected.append(RejectedItem(item, "non-numeric time"))
            continue
        if end <= start:
            rejected.append(RejectedItem(item, "inverted interval"))
            continue
        start = max(0, min(start, observation_ms))
        end = max(0, min(end, observation_ms))
        if end <= start:
            rejected.append(RejectedItem(item, "outside observation period"))
            continue
        suggestions.append(LlmSuggestion(tier, start, end, str(item["value"])))
    return suggestions, rejected


def serialize_suggestions(suggestions: list[LlmSuggestion]) -> str:
    """Suggestions as the same wire shape, times in integer ms."""
    return json.dumps([s.to_json() for s in suggestions])


def _fresh_tier_name(project: Project, base: str) -> str:
    if all(t.name != base for t in project.tiers):
        return base
    n = 2
    while any(t.name == f"{base}-{n}" for t in project.tiers):
        n += 1
    return f"{base}-{n}"


def apply_suggestions(
    project: Project, suggestions: list[LlmSuggestion]
) -> ApplyReport:
    """Materialize suggestions as fresh free-text tiers, earlier wins."""
    report = ApplyReport()
    by_tier: dict[str, list[LlmSuggestion]] = {}
    for s in suggestions:
        by_tier.setdefault(s.tier_name, []).append(s)
    for base_name, group in by_tier.items():
        tier_name = _fresh_tier_name(project, base_name)
        create_tier(project, tier_name, "free_text", origin="llm")
        report.created_tiers.append(tier_name)
        for s in sorted(group, key=lambda s: (s.start_ms, s.end_ms)):
            try:
                add_annotation(project, tier_name, s.start_ms, s.end_ms, s.value)
            except (OverlapError, OutOfRange) as exc:
                report.rejected.append(RejectedItem(s.to_json(), str(exc)))
            else:
                report.applied += 1
    return report
