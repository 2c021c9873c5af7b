"""Definition-text parsing: sections, resolution, constants, errors."""

import pytest

from conftest import IMAGE_DEF
from rosann.msg.schema import (
    VAR_ARRAY,
    SchemaSyntaxError,
    UnknownNestedType,
    parse_schema,
)


def test_image_definition_parses():
    schema = parse_schema(IMAGE_DEF, "sensor_msgs/Image")
    names = [name for name, _ in schema.fields]
    assert names == ["header", "height", "width", "encoding",
                     "is_bigendian", "step", "data"]
    kinds = {name: f.kind for name, f in schema.fields}
    assert kinds["header"] == "nested"
    assert kinds["encoding"] == "string"
    data = dict(schema.fields)["data"]
    assert data.kind == "primitive" and data.primitive == "uint8"
    assert data.array == VAR_ARRAY

    header = schema.nested_types["std_msgs/Header"]
    assert [n for n, _ in header.fields] == ["seq", "stamp", "frame_id"]
    assert dict(header.fields)["stamp"].kind == "time"

    # u32 + time + string prefix for the header, then the fixed-width tail.
    assert header.min_wire_size() == 16
    assert schema.min_wire_size() == 37


def test_constants_and_comments_are_skipped():
    text = (
        "# leading comment\n"
        "uint8 DEBUG=1  # numeric constant\n"
        "string NAME=anything goes = here\n"
        "int32 level   # trailing comment\n"
        "\n"
        "string message\n"
    )
    schema = parse_schema(text, "testpkg/Log")
    assert [n for n, _ in schema.fields] == ["level", "message"]


def test_fixed_array_sizes():
    schema = parse_schema("float64[9] covariance\nuint8[4] tag\n", "testpkg/M")
    cov = dict(schema.fields)["covariance"]
    assert cov.array == 9 and cov.primitive == "float64"
    assert schema.min_wire_size() == 9 * 8 + 4


def test_header_shorthand_gets_fallback_definition():
    # No MSG section for it anywhere: the standard layout is assumed.
    schema = parse_schema("Header header\nuint32 n\n", "testpkg/M")
    header = schema.nested_types["std_msgs/Header"]
    assert [n for n, _ in header.fields] == ["seq", "stamp", "frame_id"]


def test_package_relative_and_suffix_resolution():
    text = (
        "Inner one\n"
        "geometry_msgs/Vec two\n"
        "================================================================================\n"
        "MSG: testpkg/Inner\n"
        "int8 a\n"
        "================================================================================\n"
        "MSG: geometry_msgs/Vec\n"
        "float64 x\n"
    )
    schema = parse_schema(text, "testpkg/Outer")
    assert dict(schema.fields)["one"].nested == "testpkg/Inner"
    assert dict(schema.fields)["two"].nested == "geometry_msgs/Vec"


def test_unknown_nested_type():
    with pytest.raises(UnknownNestedType):
        parse_schema("other_msgs/Missing x\n", "testpkg/M")


def test_syntax_error_carries_line_number():
    text = "uint32 ok\nthis is not a field decl at all!\n"
    with pytest.raises(SchemaSyntaxError) as exc:
        parse_schema(text, "testpkg/M")
    assert exc.value.line_no == 2


def test_duplicate_field_name_rejected():
    with pytest.raises(SchemaSyntaxError):
        parse_schema("uint8 x\nuint8 x\n", "testpkg/M")


def test_recursive_type_rejected():
    text = (
        "testpkg/Loop child\n"
        "================================================================================\n"
        "MSG: testpkg/Loop\n"
        "testpkg/Loop again\n"
    )
    with pytest.raises(UnknownNestedType, match="recursive"):
        parse_schema(text, "testpkg/Outer")
