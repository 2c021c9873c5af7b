"""Project and codebook persistence plus CSV export.

Projects are single JSON documents, written atomically (temp file then
rename) so a crash mid-save never leaves a torn file.  Loading enforces
the same invariants the mutation operations maintain, so a hand-edited
or corrupt file is rejected with the offending tier named rather than
let into the system.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from rosann.annotation.core import (
    Annotation,
    Codebook,
    CodebookCode,
    PROJECT_VERSION,
    Project,
    TIER_KINDS,
    TIER_ORIGINS,
    Tier,
)
from rosann.errors import RosannError
from rosann.paths import DataDirs

CSV_HEADER = ["tier", "content", "start_time", "end_time"]

# Default colors handed out when a codebook omits them, in rotation.
PALETTE = (
    "#E6194B", "#3CB44B", "#FFE119", "#4363D8",
    "#F58231", "#911EB4", "#46F0F0", "#F032E6",
)


class SchemaVersionMismatch(RosannError):
    code = "SCHEMA_VERSION"


class InvariantViolation(RosannError):
    code = "INVARIANT"


class DuplicateCode(RosannError):
    code = "DUPLICATE"


class ParseError(RosannError):
    code = "PARSE"


def format_timestamp(ms: int) -> str:
    """Milliseconds from timeline origin as HH:MM:SS.mmm."""
    secs, milli = divmod(ms, 1000)
    hours, rem = divmod(secs, 3600)
    minutes, seconds = divmod(rem, 60)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{milli:03d}"


def parse_timestamp(text: str) -> int:
    hours, minutes, rest = text.split(":")
    seconds, milli = rest.split(".")
    return (
        (int(hours) * 3600 + int(minutes) * 60 + int(seconds)) * 1000
        + int(milli)
    )


def project_to_json(project: Project) -> dict:
    return {
        "version": project.version,
        "bag_id": project.bag_id,
        "observation_ms": project.observation_ms,
        "next_id": project.next_id,
        "codebooks_used": list(project.codebooks_used),
        "tiers": [
            {
                "name": tier.name,
                "kind": tier.kind,
                "codebook_ref": tier.codebook_ref,
                "origin": tier.origin,
                "annotations": [
                    {
                        "id": ann.id,
                        "start_ms": ann.start_ms,
                        "end_ms": ann.end_ms,
                        "value": ann.value,
                    }
                    for ann in tier.annotations
                ],
            }
            for tier in project.tiers
        ],
    }


def _validate_tier(tier: Tier, observation_ms: int) -> None:
    name = tier.name
    if tier.kind not in TIER_KINDS:
        raise InvariantViolation(f"tier {name!r}: unknown kind {tier.kind!r}")
    if tier.origin not in TIER_ORIGINS:
        raise InvariantViolation(f"tier {name!r}: unknown origin {tier.origin!r}")
    if (tier.codebook_ref is not None) != (tier.kind == "codebook"):
        raise InvariantViolation(f"tier {name!r}: codebook_ref/kind mismatch")
    prev_end = None
    prev_key = None
    for ann in tier.annotations:
        if not (0 <= ann.start_ms < ann.end_ms <= observation_ms):
            raise InvariantViolation(
                f"tier {name!r}: annotation {ann.id} out of range"
            )
        key = (ann.start_ms, ann.end_ms)
        if prev_key is not None and key < prev_key:
            raise InvariantViolation(f"tier {name!r}: annotations unsorted")
        if prev_end is not None and ann.start_ms < prev_end:
            raise InvariantViolation(
                f"tier {name!r}: annotation {ann.id} overlaps its predecessor"
            )
        prev_key = key
        prev_end = ann.end_ms


def project_from_json(obj: dict) -> Project:
    try:
        version = int(obj["version"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or bad version field: {exc}") from exc
    if version != PROJECT_VERSION:
        raise SchemaVersionMismatch(
            f"file is version {version}, supported version is {PROJECT_VERSION}"
        )
    try:
        project = Project(
            bag_id=str(obj["bag_id"]),
            observation_ms=int(obj["observation_ms"]),
            version=version,
            next_id=int(obj.get("next_id", 1)),
            codebooks_used=[str(n) for n in obj.get("codebooks_used", [])],
            tiers=[
                Tier(
                    name=str(t["name"]),
                    kind=str(t["kind"]),
                    codebook_ref=t.get("codebook_ref"),
                    origin=str(t.get("origin", "manual")),
                    annotations=[
                        Annotation(
                            id=str(a["id"]),
                            start_ms=int(a["start_ms"]),
                            end_ms=int(a["end_ms"]),
                            value=str(a["value"]),
                        )
                        for a in t.get("annotations", [])
                    ],
                )
                for t in obj.get("tiers", [])
            ],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed project document: {exc}") from exc

    names = [t.name for t in project.tiers]
    if len(names) != len(set(names)):
        raise InvariantViolation("duplicate tier names")
    ids = [a.id for t in project.tiers for a in t.annotations]
    if len(ids) != len(set(ids)):
        raise InvariantViolation("duplicate annotation ids")
    for tier in project.tiers:
        _validate_tier(tier, project.observation_ms)
    return project


def save_project(project: Project, dirs: DataDirs) -> Path:
    for tier in project.tiers:
        _validate_tier(tier, project.observation_ms)
    path = dirs.project_file(project.bag_id)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(project_to_json(project), indent=1))
    tmp.rename(path)
    return path


def load_project(path: str | Path) -> Project:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    return project_from_json(obj)


def export_csv(project: Project) -> str:
    """All annotations as CSV, sorted by (tier, start time)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    rows = [
        (tier.name, ann.value, ann.start_ms, ann.end_ms)
        for tier in project.tiers
        for ann in tier.annotations
    ]
    rows.sort(key=lambda r: (r[0], r[2], r[3]))
    for tier_name, value, start_ms, end_ms in rows:
        writer.writerow([
            tier_name, value,
            format_timestamp(start_ms), format_timestamp(end_ms),
        ])
    return buf.getvalue()


def codebook_to_json(book: Codebook) -> dict:
    return {
        "name": book.name,
        "codes": [
            {"code": c.code, "description": c.description, "color": c.color}
            for c in book.codes
        ],
    }


def codebook_from_json(obj: dict) -> Codebook:
    try:
        name = str(obj["name"])
        raw_codes = obj["codes"]
        if not isinstance(raw_codes, list):
            raise TypeError("codes must be a list")
        codes = []
        for i, item in enumerate(raw_codes):
            codes.append(CodebookCode(
                code=str(item["code"]),
                description=str(item.get("description", "")),
                color=str(item.get("color") or PALETTE[i % len(PALETTE)]),
            ))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed codebook: {exc}") from exc
    values = [c.code for c in codes]
    dupes = {v for v in values if values.count(v) > 1}
    if dupes:
        raise DuplicateCode(f"repeated code(s): {sorted(dupes)}")
    return Codebook(name=name, codes=tuple(codes))


def save_codebook(book: Codebook, dirs: DataDirs) -> Path:
    codebook_from_json(codebook_to_json(book))  # reuse the duplicate check
    path = dirs.booklist / f"{book.name}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(codebook_to_json(book), indent=1))
    tmp.rename(path)
    return path


def load_codebook(path: str | Path) -> Codebook:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    return codebook_from_json(obj)


def list_codebooks(dirs: DataDirs) -> dict[str, Codebook]:
    books: dict[str, Codebook] = {}
    if not dirs.booklist.is_dir():
        return books
    for path in sorted(dirs.booklist.glob("*.json")):
        book = load_codebook(path)
        books[book.name] = book
    return books
