"""Annotation statistics: five overall metrics and eight per tier.

Per tier: count, shortest, longest, mean, median, and total duration,
the percentage of the observation period covered, and latency (start of
the earliest annotation).  Overall: occurrence count, frequency per
minute, mean duration, time ratio, and latency.  The overall time ratio
uses the union of all intervals so cross-tier overlap cannot push it
past 1; per-tier percentages use the plain sum, which the within-tier
non-overlap invariant keeps at or below 100.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass

from rosann.annotation.core import Project, Tier

MS_PER_MINUTE = 60_000.0

STATS_CSV_HEADER = [
    "scope", "count", "frequency_per_min", "min_ms", "max_ms",
    "avg_ms", "median_ms", "total_ms", "percentage", "latency_ms",
]


@dataclass(frozen=True, slots=True)
class ObservationWindow:
    T_ms: int

    def __post_init__(self):
        if self.T_ms <= 0:
            raise ValueError("observation window must be positive")

    @classmethod
    def for_project(cls, project: Project) -> "ObservationWindow":
        return cls(max(project.observation_ms, 1))


@dataclass(frozen=True, slots=True)
class TierStats:
    count: int
    min_duration_ms: int | None
    max_duration_ms: int | None
    average_duration_ms: float | None
    median_duration_ms: float | None
    total_duration_ms: int
    duration_percentage: float
    latency_ms: int | None


@dataclass(frozen=True, slots=True)
class OverallStats:
    occurrences: int
    frequency_per_min: float
    average_duration_ms: float | None
    time_ratio: float
    latency_ms: int | None


def interval_union_ms(intervals: list[tuple[int, int]]) -> int:
    """Total length covered by a set of possibly overlapping intervals."""
    total = 0
    current_start = current_end = None
    for start, end in sorted(intervals):
        if current_end is None or start > current_end:
            if current_end is not None:
                total += current_end - current_start
            current_start, current_end = start, end
        elif end > current_end:
            current_end = end
    if current_end is not None:
        total += current_end - current_start
    return total


def compute_tier(tier: Tier, window: ObservationWindow) -> TierStats:
    durations = [a.end_ms - a.start_ms for a in tier.annotations]
    if not durations:
        return TierStats(0, None, None, None, None, 0, 0.0, None)
    total = sum(durations)
    return TierStats(
        count=len(durations),
        min_duration_ms=min(durations),
        max_duration_ms=max(durations),
        average_duration_ms=total / len(durations),
        median_duration_ms=float(statistics.median(durations)),
        total_duration_ms=total,
        duration_percentage=100.0 * total / window.T_ms,
        latency_ms=min(a.start_ms for a in tier.annotations),
    )


def _selected_tiers(project: Project, include_transcript: bool) -> list[Tier]:
    return [
        tier for tier in project.tiers
        if include_transcript or tier.kind != "transcript"
    ]


def compute_overall(
    project: Project,
    window: ObservationWindow,
    include_transcript: bool = True,
) -> OverallStats:
    annotations = [
        ann
        for tier in _selected_tiers(project, include_transcript)
        for ann in tier.annotations
    ]
    if not annotations:
        return OverallStats(0, 0.0, None, 0.0, None)
    durations = [a.end_ms - a.start_ms for a in annotations]
    union = interval_union_ms([(a.start_ms, a.end_ms) for a in annotations])
    return OverallStats(
        occurrences=len(annotations),
        frequency_per_min=len(annotations) / (window.T_ms / MS_PER_MINUTE),
        average_duration_ms=sum(durations) / len(durations),
        time_ratio=union / window.T_ms,
        latency_ms=min(a.start_ms for a in annotations),
    )


def compute_all(
    project: Project,
    window: ObservationWindow | None = None,
    include_transcript: bool = True,
) -> tuple[OverallStats, dict[str, TierStats]]:
    if window is None:
        window = ObservationWindow.for_project(project)
    overall = compute_overall(project, window, include_transcript)
    tiers = {
        tier.name: compute_tier(tier, window)
        for tier in _selected_tiers(project, include_transcript)
    }
    return overall, tiers


def stats_to_json(overall: OverallStats, tiers: dict[str, TierStats]) -> dict:
    return {
        "overall": {
            "occurrences": overall.occurrences,
            "frequency_per_min": overall.frequency_per_min,
            "average_duration_ms": overall.average_duration_ms,
            "time_ratio": overall.time_ratio,
            "latency_ms": overall.latency_ms,
        },
        "tiers": {
            name: {
                "count": t.count,
                "min_duration_ms": t.min_duration_ms,
                "max_duration_ms": t.max_duration_ms,
                "average_duration_ms": t.average_duration_ms,
                "median_duration_ms": t.median_duration_ms,
                "total_duration_ms": t.total_duration_ms,
                "duration_percentage": t.duration_percentage,
                "latency_ms": t.latency_ms,
            }
            for name, t in tiers.items()
        },
    }


def _cell(value) -> str:
    return "" if value is None else str(value)


def stats_to_csv(overall: OverallStats, tiers: dict[str, TierStats]) -> str:
    """Flat CSV: one OVERALL row, then one row per tier.

    Columns a scope does not define are left empty: tiers have no
    frequency, and the overall row reports coverage as 100 x time_ratio
    in the percentage column.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(STATS_CSV_HEADER)
    writer.writerow([
        "OVERALL",
        overall.occurrences,
        _cell(overall.frequency_per_min),
        "", "",
        _cell(overall.average_duration_ms),
        "", "",
        _cell(100.0 * overall.time_ratio),
        _cell(overall.latency_ms),
    ])
    for name in sorted(tiers):
        t = tiers[name]
        writer.writerow([
            name,
            t.count,
            "",
            _cell(t.min_duration_ms),
            _cell(t.max_duration_ms),
            _cell(t.average_duration_ms),
            _cell(t.median_duration_ms),
            t.total_duration_ms,
            _cell(t.duration_percentage),
            _cell(t.latency_ms),
        ])
    return buf.getvalue()


def export_stats(
    overall: OverallStats, tiers: dict[str, TierStats]
) -> tuple[str, str]:
    """(JSON document, CSV document) for the same computed values."""
    return (
        json.dumps(stats_to_json(overall, tiers), indent=1),
        stats_to_csv(overall, tiers),
    )
