import pytest
from hypothesis import given
from hypothesis import strategies as st

from certkit.canonical import (
    canonical_dumps,
    canonical_loads,
    fmt_decimal,
    normalize_timestamp,
    parse_decimal,
)
from certkit.errors import ValidationError


def test_keys_sorted_and_compact():
    data = canonical_dumps({"b": 1, "a": [1, 2], "c": {"z": None, "y": True}})
    assert data == b'{"a":[1,2],"b":1,"c":{"y":true,"z":null}}'


def test_float_literals_rejected():
    with pytest.raises(ValidationError, match="float"):
        canonical_dumps({"x": 1.5})


def test_non_string_keys_rejected():
    with pytest.raises(ValidationError):
        canonical_dumps({1: "x"})


def test_utf8_passthrough():
    data = canonical_dumps({"name": "østhavn"})
    assert "østhavn".encode("utf-8") in data
    assert canonical_loads(data) == {"name": "østhavn"}


def test_fmt_decimal_basics():
    assert fmt_decimal(0.5) == "0.5"
    assert fmt_decimal(4.0) == "4.0"
    assert fmt_decimal(-0.0) == "0.0"
    assert fmt_decimal(3) == "3.0"


def test_fmt_decimal_rejects_non_finite():
    with pytest.raises(ValidationError):
        fmt_decimal(float("nan"))
    with pytest.raises(ValidationError):
        fmt_decimal(float("inf"))


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_decimal_round_trip(x):
    assert parse_decimal(fmt_decimal(x)) == x or (x == 0.0)


def test_parse_decimal_tolerates_numbers():
    assert parse_decimal(3) == 3.0
    assert parse_decimal("1.25") == 1.25
    with pytest.raises(ValidationError):
        parse_decimal("not-a-number")
    with pytest.raises(ValidationError):
        parse_decimal(True)


def test_timestamp_normalization():
    assert normalize_timestamp("2026-01-01T00:00:00Z") == "2026-01-01T00:00:00Z"
    assert normalize_timestamp("2026-01-01T00:00:00+00:00") == "2026-01-01T00:00:00Z"
    assert normalize_timestamp("2026-01-01T02:00:00+02:00") == "2026-01-01T00:00:00Z"
    assert normalize_timestamp("2026-01-01T00:00:00.250000Z") == "2026-01-01T00:00:00.250000Z"


def test_timestamp_requires_offset():
    with pytest.raises(ValidationError):
        normalize_timestamp("2026-01-01T00:00:00")
    with pytest.raises(ValidationError):
        normalize_timestamp("yesterday")
