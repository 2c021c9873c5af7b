"""Annotation layer on its own: tiers, overlap rules, and the numbers.

No bag or media involved; this drives the in-memory project API the way
the HTTP service does, shows which edits get rejected and why, and ends
with the metrics table.

Run:  python3 demos/coding_session.py
"""

from rosann.annotation.core import (
    OverlapError,
    Project,
    add_annotation,
    create_tier,
    update_annotation,
)
from rosann.errors import RosannError
from rosann.stats import compute_all, stats_to_csv

project = Project(bag_id="demo", observation_ms=60_000)  # one minute
create_tier(project, "gestures", "free_text")
create_tier(project, "speech acts", "free_text")

add_annotation(project, "gestures", 2_000, 4_500, "points at screen")
add_annotation(project, "gestures", 10_000, 11_000, "waves")
add_annotation(project, "speech acts", 3_000, 6_000, "asks for help")

print("tiers may overlap each other, a single tier may not:")
try:
    add_annotation(project, "gestures", 4_000, 5_000, "reaches out")
except OverlapError as exc:
    print(f"  rejected: {exc}")

print("touching endpoints are fine:")
ann = add_annotation(project, "gestures", 4_500, 5_000, "reaches out")
print(f"  {ann.id} spans {ann.start_ms}-{ann.end_ms} ms")

print("a failed move leaves everything as it was:")
try:
    update_annotation(project, ann.id, start_ms=9_000, end_ms=10_500)
except RosannError as exc:
    print(f"  rejected: {exc}")
moved = update_annotation(project, ann.id, start_ms=8_000, end_ms=9_500)
print(f"  {moved.id} now spans {moved.start_ms}-{moved.end_ms} ms")

overall, tiers = compute_all(project)
print()
print(stats_to_csv(overall, tiers))
