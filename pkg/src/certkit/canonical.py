"""Canonical JSON serialization.

Every hashed record (annotations, manifests, domain specs, reports) is
serialized through this module so that its digest depends only on content,
never on writer quirks. The canonical byte form is:

  * UTF-8 JSON, object keys sorted lexicographically byte-wise,
  * no insignificant whitespace,
  * integers as plain decimal,
  * every non-integer numeric encoded as a decimal string, never as a
    float literal (float formatting is the classic source of digest drift).

Encoding a raw ``float`` is therefore a programming error here; callers
convert real-valued fields with :func:`fmt_decimal` first.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone

from .errors import ValidationError

_ATOMS = (str, int, bool, type(None))


def _check_tree(obj, path: str) -> None:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return
    if isinstance(obj, float):
        raise ValidationError(
            f"canonical form must not contain float literals (at {path}); "
            "use fmt_decimal() for real-valued fields"
        )
    if isinstance(obj, dict):
        for key, value in obj.items():
            if not isinstance(key, str):
                raise ValidationError(f"canonical object keys must be strings (at {path})")
            _check_tree(value, f"{path}.{key}")
        return
    if isinstance(obj, (list, tuple)):
        for i, value in enumerate(obj):
            _check_tree(value, f"{path}[{i}]")
        return
    raise ValidationError(f"type {type(obj).__name__} not allowed in canonical form (at {path})")


def canonical_dumps(obj) -> bytes:
    """Serialize ``obj`` to its canonical byte form."""
    _check_tree(obj, "$")
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def canonical_loads(data: bytes):
    return json.loads(data.decode("utf-8"))


def fmt_decimal(value) -> str:
    """Render a real value as the decimal string used in canonical form.

    Uses the shortest round-trip representation, so parse_decimal(fmt_decimal(x))
    recovers x exactly. Negative zero folds to "0.0"; NaN and infinities are
    rejected because they have no canonical decimal form.
    """
    x = float(value)
    if math.isnan(x) or math.isinf(x):
        raise ValidationError(f"non-finite value {value!r} has no canonical form")
    if x == 0.0:
        x = 0.0  # fold -0.0
    return repr(x)


def parse_decimal(value) -> float:
    """Inverse of fmt_decimal; also tolerates plain JSON numbers on input."""
    if isinstance(value, bool):
        raise ValidationError(f"expected a numeric value, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise ValidationError(f"not a decimal string: {value!r}") from None
    raise ValidationError(f"expected a numeric value, got {type(value).__name__}")


def normalize_timestamp(value: str) -> str:
    """Normalize an ISO-8601 timestamp to a single canonical UTC spelling.

    Output is ``YYYY-MM-DDTHH:MM:SSZ`` (microseconds appended only when
    nonzero). Naive timestamps are rejected; content hashes must not depend
    on an implicit local timezone.
    """
    if not isinstance(value, str):
        raise ValidationError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ValidationError(f"invalid timestamp: {value!r}") from None
    if dt.tzinfo is None:
        raise ValidationError(f"timestamp must carry a UTC offset: {value!r}")
    dt = dt.astimezone(timezone.utc)
    base = dt.strftime("%Y-%m-%dT%H:%M:%S")
    if dt.microsecond:
        base += f".{dt.microsecond:06d}"
    return base + "Z"
