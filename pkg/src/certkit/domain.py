"""Operational-domain specification and dataset coverage verification.

A domain spec enumerates the external conditions the system must handle as
dimensions (numeric dimensions carry half-open ``[lo, hi)`` interval bins,
categorical ones carry category lists). Coverage counts how a dataset
populates every bin and passes only when each bin meets its ``min_count``.
Observed-vs-expected proportion deviations are reported but never gate the
result on their own.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .canonical import canonical_dumps, fmt_decimal, parse_decimal
from .errors import FormatError, ValidationError
from .store import Digest

DIMENSION_KINDS = ("categorical", "numeric")
SAMPLING_UNITS = ("box", "image")

# Dimensions keyed on these names describe the intruder itself, so their
# sampling unit defaults to a ground-truth box rather than an image.
_BOX_UNIT_DEFAULTS = frozenset({"intruder_range_m"})

_PROPORTION_TOL = 1e-9


def _coerce_numeric(value):
    """Best-effort numeric coercion used when binning attribute values."""
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


@dataclass(frozen=True)
class DomainDimension:
    name: str
    kind: str
    bins: tuple  # categorical: tuple[str]; numeric: tuple[(lo, hi)]
    min_count: tuple[int, ...]
    expected_proportion: tuple[float, ...] | None = None
    unit: str = "image"

    def __post_init__(self):
        if self.kind not in DIMENSION_KINDS:
            raise ValidationError(f"dimension kind must be one of {DIMENSION_KINDS}")
        if self.unit not in SAMPLING_UNITS:
            raise ValidationError(f"sampling unit must be one of {SAMPLING_UNITS}")
        if not self.bins:
            raise ValidationError(f"dimension {self.name!r} has no bins")
        if self.kind == "categorical":
            if len(set(self.bins)) != len(self.bins):
                raise ValidationError(f"dimension {self.name!r} has duplicate categories")
        else:
            prev_hi = None
            for lo, hi in self.bins:
                if not lo < hi:
                    raise ValidationError(
                        f"dimension {self.name!r}: interval [{lo},{hi}) is empty"
                    )
                if prev_hi is not None and lo < prev_hi:
                    raise ValidationError(
                        f"dimension {self.name!r}: intervals overlap at [{lo},{hi})"
                    )
                prev_hi = hi
        if len(self.min_count) != len(self.bins):
            raise ValidationError(f"dimension {self.name!r}: min_count must match bin count")
        if any(m < 0 for m in self.min_count):
            raise ValidationError(f"dimension {self.name!r}: min_count must be non-negative")
        if self.expected_proportion is not None:
            if len(self.expected_proportion) != len(self.bins):
                raise ValidationError(
                    f"dimension {self.name!r}: expected_proportion must match bin count"
                )
            if any(p < 0 for p in self.expected_proportion):
                raise ValidationError(f"dimension {self.name!r}: proportions must be >= 0")
            total = sum(self.expected_proportion)
            if abs(total - 1.0) > _PROPORTION_TOL:
                raise ValidationError(
                    f"dimension {self.name!r}: proportions sum to {total!r}, not 1"
                )

    def bin_of(self, value) -> int | None:
        """Index of the bin holding ``value``, or None when outside all bins."""
        if value is None:
            return None
        if self.kind == "categorical":
            if not isinstance(value, str):
                raise ValidationError(
                    f"dimension {self.name!r} is categorical but value is "
                    f"{type(value).__name__}"
                )
            try:
                return self.bins.index(value)
            except ValueError:
                return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(
                f"dimension {self.name!r} is numeric but value is {type(value).__name__}"
            )
        v = float(value)
        for i, (lo, hi) in enumerate(self.bins):
            if lo <= v < hi:
                return i
        return None

    def bin_labels(self) -> list[str]:
        if self.kind == "categorical":
            return list(self.bins)
        return [f"[{fmt_decimal(lo)},{fmt_decimal(hi)})" for lo, hi in self.bins]

    def to_canonical(self) -> dict:
        if self.kind == "categorical":
            bins = list(self.bins)
        else:
            bins = [[fmt_decimal(lo), fmt_decimal(hi)] for lo, hi in self.bins]
        return {
            "name": self.name,
            "kind": self.kind,
            "unit": self.unit,
            "bins": bins,
            "min_count": list(self.min_count),
            "expected_proportion": (
                [fmt_decimal(p) for p in self.expected_proportion]
                if self.expected_proportion is not None
                else None
            ),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "DomainDimension":
        name = obj.get("name")
        if not name or not isinstance(name, str):
            raise ValidationError("dimension requires a non-empty string name")
        kind = obj.get("kind")
        raw_bins = obj.get("bins")
        if not isinstance(raw_bins, list) or not raw_bins:
            raise ValidationError(f"dimension {name!r}: bins must be a non-empty list")
        if kind == "categorical":
            if not all(isinstance(b, str) for b in raw_bins):
                raise ValidationError(f"dimension {name!r}: categorical bins must be strings")
            bins: tuple = tuple(raw_bins)
        elif kind == "numeric":
            if not all(isinstance(b, (list, tuple)) and len(b) == 2 for b in raw_bins):
                raise ValidationError(f"dimension {name!r}: numeric bins must be [lo, hi] pairs")
            bins = tuple((parse_decimal(b[0]), parse_decimal(b[1])) for b in raw_bins)
        else:
            raise ValidationError(f"dimension {name!r}: kind must be one of {DIMENSION_KINDS}")
        raw_min = obj.get("min_count", 0)
        if isinstance(raw_min, int) and not isinstance(raw_min, bool):
            min_count = tuple([raw_min] * len(bins))
        elif isinstance(raw_min, list):
            min_count = tuple(raw_min)
        else:
            raise ValidationError(f"dimension {name!r}: min_count must be an int or list")
        expected = obj.get("expected_proportion")
        proportions = (
            tuple(parse_decimal(p) for p in expected) if expected is not None else None
        )
        unit = obj.get("unit") or ("box" if name in _BOX_UNIT_DEFAULTS else "image")
        return cls(
            name=name,
            kind=kind,
            bins=bins,
            min_count=min_count,
            expected_proportion=proportions,
            unit=unit,
        )


@dataclass(frozen=True)
class OperationalDomainSpec:
    dimensions: tuple[DomainDimension, ...]

    def __post_init__(self):
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ValidationError("dimension names must be unique")

    def to_canonical(self) -> dict:
        return {"dimensions": [d.to_canonical() for d in self.dimensions]}

    @classmethod
    def from_obj(cls, obj: dict) -> "OperationalDomainSpec":
        dims = obj.get("dimensions")
        if not isinstance(dims, list):
            raise ValidationError("domain spec requires a 'dimensions' list")
        return cls(tuple(DomainDimension.from_obj(d) for d in dims))

    @property
    def spec_id(self) -> Digest:
        return Digest.of_bytes(canonical_dumps(self.to_canonical()))

    def dimension(self, name: str) -> DomainDimension:
        for d in self.dimensions:
            if d.name == name:
                return d
        raise ValidationError(f"domain spec has no dimension named {name!r}")


def load_domain_spec(path: str | Path) -> OperationalDomainSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"domain spec is not valid JSON: {exc.msg}") from None
    return OperationalDomainSpec.from_obj(obj)


# -- coverage ------------------------------------------------------------------


@dataclass(frozen=True)
class BinCoverage:
    label: str
    count: int
    min_count: int
    covered: bool
    observed_proportion: float
    expected_proportion: float | None
    deviation: float | None


@dataclass(frozen=True)
class DimensionCoverage:
    name: str
    unit: str
    bins: tuple[BinCoverage, ...]
    unbinned_count: int
    total_samples: int

    @property
    def passed(self) -> bool:
        return all(b.covered for b in self.bins)


@dataclass(frozen=True)
class CrossTabulation:
    dim_a: str
    dim_b: str
    counts: tuple[tuple[int, int, int], ...]  # (bin_a, bin_b, count), binned-in-both only


@dataclass(frozen=True)
class CoverageReport:
    dimensions: tuple[DimensionCoverage, ...]
    overall_pass: bool
    cross: CrossTabulation | None = None

    def to_canonical(self) -> dict:
        doc = {
            "overall_pass": self.overall_pass,
            "dimensions": [
                {
                    "name": d.name,
                    "unit": d.unit,
                    "unbinned_count": d.unbinned_count,
                    "total_samples": d.total_samples,
                    "passed": d.passed,
                    "bins": [
                        {
                            "label": b.label,
                            "count": b.count,
                            "min_count": b.min_count,
                            "covered": b.covered,
                            "observed_proportion": fmt_decimal(b.observed_proportion),
                            "expected_proportion": (
                                fmt_decimal(b.expected_proportion)
                                if b.expected_proportion is not None
                                else None
                            ),
                            "deviation": (
                                fmt_decimal(b.deviation) if b.deviation is not None else None
                            ),
                        }
                        for b in d.bins
                    ],
                }
                for d in self.dimensions
            ],
        }
        if self.cross is not None:
            doc["cross_tabulation"] = {
                "dimensions": [self.cross.dim_a, self.cross.dim_b],
                "counts": [list(row) for row in self.cross.counts],
            }
        return doc


def sample_value(meta, record, name: str):
    """Resolve a dimension name against an annotation's attributes, falling
    back to the image's capture metadata fields."""
    if name in record.attributes:
        return record.attributes[name]
    for attr in ("camera_id", "flight_id", "sequence_id"):
        if name == attr:
            return getattr(meta, attr)
    return None


def _bin_sample(dim: DomainDimension, value) -> int | None:
    if value is None:
        return None
    if dim.kind == "numeric":
        return dim.bin_of(_coerce_numeric(value))
    return dim.bin_of(value) if isinstance(value, str) else None


def coverage_of_samples(
    samples: list[tuple[dict, int]],
    spec: OperationalDomainSpec,
    cross: tuple[str, str] | None = None,
) -> CoverageReport:
    """Coverage over pre-extracted samples.

    Each sample is ``(attribute mapping, ground-truth box count)``; a
    box-unit dimension counts each box once, an image-unit dimension counts
    the sample once. Missing or unusable values land in ``unbinned_count``.
    """
    dim_results = []
    for dim in spec.dimensions:
        counts = [0] * len(dim.bins)
        unbinned = 0
        total = 0
        for attrs, n_boxes in samples:
            weight = n_boxes if dim.unit == "box" else 1
            if weight == 0:
                continue
            total += weight
            idx = _bin_sample(dim, attrs.get(dim.name))
            if idx is None:
                unbinned += weight
            else:
                counts[idx] += weight
        binned_total = total - unbinned
        labels = dim.bin_labels()
        bins = []
        for i, count in enumerate(counts):
            observed = count / binned_total if binned_total else 0.0
            expected = (
                dim.expected_proportion[i] if dim.expected_proportion is not None else None
            )
            bins.append(
                BinCoverage(
                    label=labels[i],
                    count=count,
                    min_count=dim.min_count[i],
                    covered=count >= dim.min_count[i],
                    observed_proportion=observed,
                    expected_proportion=expected,
                    deviation=observed - expected if expected is not None else None,
                )
            )
        dim_results.append(
            DimensionCoverage(
                name=dim.name,
                unit=dim.unit,
                bins=tuple(bins),
                unbinned_count=unbinned,
                total_samples=total,
            )
        )

    cross_result = None
    if cross is not None:
        dim_a = spec.dimension(cross[0])
        dim_b = spec.dimension(cross[1])
        unit = "box" if "box" in (dim_a.unit, dim_b.unit) else "image"
        table: dict[tuple[int, int], int] = {}
        for attrs, n_boxes in samples:
            weight = n_boxes if unit == "box" else 1
            if weight == 0:
                continue
            ia = _bin_sample(dim_a, attrs.get(dim_a.name))
            ib = _bin_sample(dim_b, attrs.get(dim_b.name))
            if ia is None or ib is None:
                continue
            table[(ia, ib)] = table.get((ia, ib), 0) + weight
        cross_result = CrossTabulation(
            dim_a=dim_a.name,
            dim_b=dim_b.name,
            counts=tuple((a, b, c) for (a, b), c in sorted(table.items())),
        )

    return CoverageReport(
        dimensions=tuple(dim_results),
        overall_pass=all(d.passed for d in dim_results),
        cross=cross_result,
    )


def coverage(
    repo,
    dataset_id: Digest,
    spec: OperationalDomainSpec,
    cross: tuple[str, str] | None = None,
) -> CoverageReport:
    """Coverage of a committed dataset against a domain spec."""
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    samples = []
    for entry in manifest.entries:
        meta = repo.image_meta(entry.image)
        record = repo.get_annotation(entry.annotation)
        attrs = {
            name: sample_value(meta, record, name)
            for name in (d.name for d in spec.dimensions)
        }
        if cross is not None:
            for name in cross:
                attrs.setdefault(name, sample_value(meta, record, name))
        samples.append((attrs, len(record.boxes)))
    return coverage_of_samples(samples, spec, cross=cross)
