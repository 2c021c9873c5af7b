"""Persistence: JSON round-trips, validation on load, CSV export shape."""

import csv
import io
import json
import random

import pytest

from conftest import build_random_project, demo_codebook
from rosann.annotation.core import (
    Annotation,
    Codebook,
    CodebookCode,
    Project,
    Tier,
    add_annotation,
    create_tier,
)
from rosann.annotation.storage import (
    CSV_HEADER,
    DuplicateCode,
    InvariantViolation,
    ParseError,
    SchemaVersionMismatch,
    codebook_from_json,
    codebook_to_json,
    export_csv,
    format_timestamp,
    list_codebooks,
    load_codebook,
    load_project,
    parse_timestamp,
    project_from_json,
    project_to_json,
    save_codebook,
    save_project,
)


def test_timestamp_format():
    assert format_timestamp(0) == "00:00:00.000"
    assert format_timestamp(61_001) == "00:01:01.001"
    assert format_timestamp(3_600_000 + 23 * 60_000 + 45_678) == "01:23:45.678"


def test_timestamp_parse_inverts_format():
    for ms in (0, 1, 999, 60_000, 3_599_999, 86_399_999):
        assert parse_timestamp(format_timestamp(ms)) == ms


def test_project_json_roundtrip_randomized():
    rng = random.Random(404)
    for _ in range(60):
        project, _ = build_random_project(rng)
        clone = project_from_json(json.loads(json.dumps(project_to_json(project))))
        assert clone == project


def test_save_load_identity_on_disk(data_dirs):
    rng = random.Random(405)
    project, _ = build_random_project(rng, T_ms=20_000)
    path = save_project(project, data_dirs)
    assert load_project(path) == project
    # Atomic write leaves no temp file behind.
    assert list(path.parent.glob("*.tmp")) == []


def test_version_mismatch_rejected():
    obj = project_to_json(Project(bag_id="b", observation_ms=10))
    obj["version"] = 99
    with pytest.raises(SchemaVersionMismatch):
        project_from_json(obj)


def test_parse_errors():
    with pytest.raises(ParseError):
        project_from_json({"bag_id": "b"})
    with pytest.raises(ParseError):
        load_project_from_text("not json {")


def load_project_from_text(text: str):
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        fh.write(text)
        name = fh.name
    return load_project(name)


def _project_with(tier: Tier) -> dict:
    p = Project(bag_id="b", observation_ms=10_000)
    p.tiers.append(tier)
    return project_to_json(p)


def test_load_rejects_overlapping_annotations_naming_tier():
    tier = Tier("sneaky", "free_text", annotations=[
        Annotation("a1", 0, 2000, "x"), Annotation("a2", 1000, 3000, "y"),
    ])
    with pytest.raises(InvariantViolation, match="sneaky"):
        project_from_json(_project_with(tier))


def test_load_rejects_out_of_window_annotation():
    tier = Tier("t", "free_text", annotations=[Annotation("a1", 0, 20_000, "x")])
    with pytest.raises(InvariantViolation):
        project_from_json(_project_with(tier))


def test_load_rejects_duplicate_annotation_ids():
    tier = Tier("t", "free_text", annotations=[
        Annotation("a1", 0, 10, "x"), Annotation("a1", 20, 30, "y"),
    ])
    with pytest.raises(InvariantViolation):
        project_from_json(_project_with(tier))


def test_save_refuses_corrupted_project(data_dirs):
    p = Project(bag_id="b", observation_ms=1000)
    create_tier(p, "t", "free_text")
    p.tier("t").annotations.append(Annotation("a1", 5, 5, "degenerate"))
    with pytest.raises(InvariantViolation):
        save_project(p, data_dirs)


def test_csv_export_shape_and_order():
    p = Project(bag_id="b", observation_ms=100_000)
    create_tier(p, "zeta", "free_text")
    create_tier(p, "alpha", "free_text")
    add_annotation(p, "zeta", 61_001, 62_000, "has, comma")
    add_annotation(p, "alpha", 500, 1500, 'quote "inside"')
    add_annotation(p, "alpha", 0, 250, "first")

    doc = export_csv(p)
    rows = list(csv.reader(io.StringIO(doc)))
    assert rows[0] == CSV_HEADER
    assert rows[1] == ["alpha", "first", "00:00:00.000", "00:00:00.250"]
    assert rows[2] == ["alpha", 'quote "inside"', "00:00:00.500", "00:00:01.500"]
    assert rows[3] == ["zeta", "has, comma", "00:01:01.001", "00:01:02.000"]
    assert doc.endswith("\r\n")


def test_csv_reparse_identity():
    rng = random.Random(406)
    project, _ = build_random_project(rng, T_ms=50_000)
    rows = list(csv.reader(io.StringIO(export_csv(project))))[1:]
    expected = sorted(
        (t.name, a.value, a.start_ms, a.end_ms)
        for t in project.tiers
        for a in t.annotations
    )
    got = sorted(
        (tier, content, parse_timestamp(start), parse_timestamp(end))
        for tier, content, start, end in rows
    )
    assert got == expected


def test_codebook_roundtrip_and_palette(data_dirs):
    book = Codebook("mixed", (
        CodebookCode("with-color", "desc", "#123456"),
        CodebookCode("default-one", ""),
        CodebookCode("default-two", ""),
    ))
    clone = codebook_from_json(codebook_to_json(book))
    assert clone.codes[0].color == "#123456"
    assert clone.codes[0] == book.codes[0]

    path = save_codebook(book, data_dirs)
    assert load_codebook(path).code_values() == book.code_values()
    assert list_codebooks(data_dirs)["mixed"].code_values() == book.code_values()


def test_default_colors_differ_for_adjacent_codes():
    book = codebook_from_json({
        "name": "plain",
        "codes": [{"code": f"c{i}"} for i in range(4)],
    })
    colors = [c.color for c in book.codes]
    assert len(set(colors)) == 4


def test_duplicate_codes_rejected_with_names():
    with pytest.raises(DuplicateCode, match="smile"):
        codebook_from_json({
            "name": "dup",
            "codes": [{"code": "smile"}, {"code": "nod"}, {"code": "smile"}],
        })


def test_save_codebook_visible_to_list(data_dirs):
    save_codebook(demo_codebook(), data_dirs)
    books = list_codebooks(data_dirs)
    assert set(books) == {"social-cues"}
