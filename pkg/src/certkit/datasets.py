"""Images, bounding boxes, versioned annotations, and versioned dataset
manifests with full lineage.

Everything committed here is content-addressed: an annotation id or dataset
id is the SHA-256 of the record's canonical form, so identical content gets
identical ids, parent chains cannot form cycles, and history is tamper
evident. Dataset names are mutable ref pointers to the tip of a linear
version chain; the committed manifests themselves never change.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .canonical import (
    canonical_dumps,
    fmt_decimal,
    normalize_timestamp,
    parse_decimal,
)
from .errors import FormatError, IntegrityError, NotFoundError, ValidationError
from .store import ContentStore, Digest

DATASET_ROLES = ("development-train", "development-validation", "certification")
BOX_SOURCES = ("auto", "manual")

# Attribute keys with a declared numeric type; their values are coerced back
# to floats when records are loaded (canonical form stores reals as strings).
RESERVED_NUMERIC_ATTRS = frozenset({"intruder_range_m"})


@dataclass(frozen=True)
class OwnshipPose:
    latitude_deg: float
    longitude_deg: float
    altitude_m: float
    heading_deg: float
    pitch_deg: float
    roll_deg: float

    def to_canonical(self) -> dict:
        return {
            "latitude_deg": fmt_decimal(self.latitude_deg),
            "longitude_deg": fmt_decimal(self.longitude_deg),
            "altitude_m": fmt_decimal(self.altitude_m),
            "heading_deg": fmt_decimal(self.heading_deg),
            "pitch_deg": fmt_decimal(self.pitch_deg),
            "roll_deg": fmt_decimal(self.roll_deg),
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "OwnshipPose":
        return cls(**{k: parse_decimal(v) for k, v in obj.items()})


@dataclass(frozen=True)
class ImageMeta:
    """Capture metadata for one image, keyed by the image's content digest.

    ``width``/``height`` may be left None before ingest; the completed record
    always carries the dimensions extracted from the image container.
    """

    camera_id: str
    flight_id: str
    capture_time: str
    width: int | None = None
    height: int | None = None
    sequence_id: str | None = None
    frame_index: int | None = None
    ownship_pose: OwnshipPose | None = None
    image_digest: Digest | None = None

    def __post_init__(self):
        if self.width is not None and self.width <= 0:
            raise ValidationError(f"width must be positive, got {self.width}")
        if self.height is not None and self.height <= 0:
            raise ValidationError(f"height must be positive, got {self.height}")
        if (self.sequence_id is None) != (self.frame_index is None):
            raise ValidationError("frame_index and sequence_id must be given together")
        if self.frame_index is not None and self.frame_index < 0:
            raise ValidationError(f"frame_index must be non-negative, got {self.frame_index}")
        object.__setattr__(self, "capture_time", normalize_timestamp(self.capture_time))

    def to_canonical(self) -> dict:
        if self.image_digest is None or self.width is None or self.height is None:
            raise ValidationError("image metadata is incomplete; ingest the image first")
        return {
            "image": self.image_digest.hex,
            "width": self.width,
            "height": self.height,
            "capture_time": self.capture_time,
            "camera_id": self.camera_id,
            "flight_id": self.flight_id,
            "sequence_id": self.sequence_id,
            "frame_index": self.frame_index,
            "ownship_pose": self.ownship_pose.to_canonical() if self.ownship_pose else None,
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "ImageMeta":
        pose = obj.get("ownship_pose")
        return cls(
            camera_id=obj["camera_id"],
            flight_id=obj["flight_id"],
            capture_time=obj["capture_time"],
            width=obj["width"],
            height=obj["height"],
            sequence_id=obj.get("sequence_id"),
            frame_index=obj.get("frame_index"),
            ownship_pose=OwnshipPose.from_canonical(pose) if pose else None,
            image_digest=Digest(obj["image"]),
        )


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box, top-left corner + size, sub-pixel coordinates."""

    x: float
    y: float
    w: float
    h: float
    class_label: str
    source: str = "manual"

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValidationError(f"box size must be positive, got w={self.w}, h={self.h}")
        if self.x < 0 or self.y < 0:
            raise ValidationError(f"box corner must be non-negative, got x={self.x}, y={self.y}")
        if self.source not in BOX_SOURCES:
            raise ValidationError(f"box source must be one of {BOX_SOURCES}, got {self.source!r}")
        if not self.class_label:
            raise ValidationError("box class_label must be non-empty")

    def validate_within(self, width: int, height: int) -> None:
        if self.x + self.w > width or self.y + self.h > height:
            raise ValidationError(
                f"box ({self.x},{self.y},{self.w},{self.h}) exceeds image bounds {width}x{height}"
            )

    def to_canonical(self) -> dict:
        return {
            "x": fmt_decimal(self.x),
            "y": fmt_decimal(self.y),
            "w": fmt_decimal(self.w),
            "h": fmt_decimal(self.h),
            "class": self.class_label,
            "source": self.source,
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "BoundingBox":
        return cls(
            x=parse_decimal(obj["x"]),
            y=parse_decimal(obj["y"]),
            w=parse_decimal(obj["w"]),
            h=parse_decimal(obj["h"]),
            class_label=obj["class"],
            source=obj["source"],
        )


def _attributes_to_canonical(attributes: dict) -> dict:
    out = {}
    for key, value in attributes.items():
        if not isinstance(key, str) or not key:
            raise ValidationError(f"attribute keys must be non-empty strings, got {key!r}")
        if key in RESERVED_NUMERIC_ATTRS:
            out[key] = fmt_decimal(parse_decimal(value))
        elif isinstance(value, bool) or isinstance(value, (str, int)) or value is None:
            out[key] = value
        elif isinstance(value, float):
            out[key] = fmt_decimal(value)
        else:
            raise ValidationError(f"attribute {key!r} has unsupported type {type(value).__name__}")
    return out


def _attributes_from_canonical(obj: dict) -> dict:
    return {
        key: parse_decimal(value) if key in RESERVED_NUMERIC_ATTRS else value
        for key, value in obj.items()
    }


@dataclass(frozen=True)
class AnnotationRecord:
    """Versioned labels and attributes for one image.

    The record id is the digest of the canonical form, which includes the
    parent id, so refinement chains are immutable and acyclic by construction.
    """

    image_digest: Digest
    boxes: tuple[BoundingBox, ...]
    attributes: dict
    author: str
    created_at: str
    parent: Digest | None = None

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "created_at", normalize_timestamp(self.created_at))

    def to_canonical(self) -> dict:
        return {
            "image": self.image_digest.hex,
            "parent": self.parent.hex if self.parent else None,
            "boxes": [b.to_canonical() for b in self.boxes],
            "attributes": _attributes_to_canonical(self.attributes),
            "author": self.author,
            "created_at": self.created_at,
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "AnnotationRecord":
        return cls(
            image_digest=Digest(obj["image"]),
            boxes=tuple(BoundingBox.from_canonical(b) for b in obj["boxes"]),
            attributes=_attributes_from_canonical(obj["attributes"]),
            author=obj["author"],
            created_at=obj["created_at"],
            parent=Digest(obj["parent"]) if obj.get("parent") else None,
        )


@dataclass(frozen=True)
class DatasetEntry:
    image: Digest
    annotation: Digest


@dataclass(frozen=True)
class DatasetManifest:
    """Role-tagged, versioned collection of (image, annotation) pairs."""

    name: str
    version: int
    role: str
    entries: tuple[DatasetEntry, ...]
    parent: Digest | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.role not in DATASET_ROLES:
            raise ValidationError(f"dataset role must be one of {DATASET_ROLES}, got {self.role!r}")
        if self.version < 1:
            raise ValidationError(f"dataset version must be >= 1, got {self.version}")
        seen = set()
        for entry in self.entries:
            if entry.image.hex in seen:
                raise ValidationError(f"duplicate image in dataset entries: {entry.image.hex}")
            seen.add(entry.image.hex)

    def entry_map(self) -> dict[str, str]:
        return {e.image.hex: e.annotation.hex for e in self.entries}

    def to_canonical(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "role": self.role,
            "parent": self.parent.hex if self.parent else None,
            # Entries sorted by image digest: manifests are sets, and the
            # canonical byte form must not depend on insertion order.
            "entries": [
                {"image": e.image.hex, "annotation": e.annotation.hex}
                for e in sorted(self.entries, key=lambda e: e.image.hex)
            ],
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "DatasetManifest":
        return cls(
            name=obj["name"],
            version=obj["version"],
            role=obj["role"],
            entries=tuple(
                DatasetEntry(Digest(e["image"]), Digest(e["annotation"]))
                for e in obj["entries"]
            ),
            parent=Digest(obj["parent"]) if obj.get("parent") else None,
        )


@dataclass(frozen=True)
class DatasetDiff:
    added: tuple[str, ...]
    removed: tuple[str, ...]
    annotation_changed: tuple[tuple[str, str, str], ...]  # (image, old, new)

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.annotation_changed)


@dataclass(frozen=True)
class DisjointnessReport:
    image_overlap: tuple[str, ...]
    flight_overlap: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.image_overlap and not self.flight_overlap


class Repository:
    """Dataset, annotation, and image operations over a content store."""

    def __init__(self, store: ContentStore):
        self.store = store

    # -- images ------------------------------------------------------------

    def ingest_image(self, data: bytes, meta: ImageMeta) -> ImageMeta:
        """Store image bytes and persist completed capture metadata.

        Dimensions are extracted from the image container; if the caller
        supplied width/height they must agree. Re-ingesting identical bytes
        with identical metadata is a no-op.
        """
        try:
            with Image.open(io.BytesIO(data)) as img:
                width, height = img.size
        except (UnidentifiedImageError, OSError) as exc:
            raise ValidationError(f"cannot decode image: {exc}") from None
        if meta.width is not None and meta.width != width:
            raise ValidationError(f"metadata width {meta.width} != container width {width}")
        if meta.height is not None and meta.height != height:
            raise ValidationError(f"metadata height {meta.height} != container height {height}")

        digest = self.store.put(data, "image")
        completed = replace(meta, width=width, height=height, image_digest=digest)
        canonical = canonical_dumps(completed.to_canonical())
        if self.store.has_ref("images", digest.hex):
            existing = self.store.get(self.store.get_ref("images", digest.hex))
            if existing != canonical:
                raise ValidationError(
                    f"image {digest.hex} already ingested with different metadata"
                )
            return completed
        meta_digest = self.store.put(canonical, "image-meta")
        self.store.set_ref("images", digest.hex, meta_digest)
        return completed

    def image_meta(self, image_digest: Digest) -> ImageMeta:
        if not self.store.has_ref("images", image_digest.hex):
            raise NotFoundError(f"no metadata for image {image_digest.hex}")
        meta_digest = self.store.get_ref("images", image_digest.hex)
        return ImageMeta.from_canonical(self.store.get_json(meta_digest))

    # -- annotations ---------------------------------------------------------

    def commit_annotation(self, record: AnnotationRecord) -> Digest:
        meta = self.image_meta(record.image_digest)  # also checks the image is known
        if not self.store.exists(record.image_digest):
            raise NotFoundError(f"unknown image: {record.image_digest.hex}")
        for box in record.boxes:
            box.validate_within(meta.width, meta.height)
        if record.parent is not None:
            parent = self.get_annotation(record.parent)
            if parent.image_digest != record.image_digest:
                raise ValidationError(
                    "annotation parent references a different image "
                    f"({parent.image_digest.hex} != {record.image_digest.hex})"
                )
        return self.store.put_json(record.to_canonical(), "annotation")

    def get_annotation(self, annotation_id: Digest) -> AnnotationRecord:
        try:
            obj = self.store.get_json(annotation_id)
        except NotFoundError:
            raise NotFoundError(f"unknown annotation: {annotation_id.hex}") from None
        return AnnotationRecord.from_canonical(obj)

    def annotation_history(self, annotation_id: Digest) -> list[Digest]:
        chain = [annotation_id]
        record = self.get_annotation(annotation_id)
        while record.parent is not None:
            chain.append(record.parent)
            record = self.get_annotation(record.parent)
        return chain

    # -- datasets -------------------------------------------------------------

    def commit_dataset(self, manifest: DatasetManifest) -> Digest:
        digest = Digest.of_bytes(canonical_dumps(manifest.to_canonical()))
        if self.store.exists(digest):
            return digest  # identical content already committed

        for entry in manifest.entries:
            if not self.store.exists(entry.image):
                raise NotFoundError(f"dataset references unknown image {entry.image.hex}")
            record = self.get_annotation(entry.annotation)
            if record.image_digest != entry.image:
                raise ValidationError(
                    f"annotation {entry.annotation.hex} does not reference image {entry.image.hex}"
                )

        if manifest.parent is None:
            if manifest.version != 1:
                raise ValidationError("a dataset without a parent must be version 1")
            if self.store.has_ref("datasets", manifest.name):
                raise ValidationError(f"dataset name already exists: {manifest.name!r}")
        else:
            parent = self.checkout_dataset(manifest.parent, verify=False)
            if parent.name != manifest.name:
                raise ValidationError(
                    f"parent dataset is named {parent.name!r}, not {manifest.name!r}"
                )
            if manifest.version != parent.version + 1:
                raise ValidationError(
                    f"version must be {parent.version + 1}, got {manifest.version}"
                )
            tip = self.store.get_ref("datasets", manifest.name)
            if tip != manifest.parent:
                raise ValidationError(
                    f"parent {manifest.parent.hex} is not the tip of {manifest.name!r}; "
                    "version chains are linear"
                )

        stored = self.store.put_json(manifest.to_canonical(), "dataset-manifest")
        self.store.set_ref("datasets", manifest.name, stored)
        return stored

    def create_dataset(
        self, name: str, role: str, entries: list[DatasetEntry] | tuple[DatasetEntry, ...]
    ) -> Digest:
        return self.commit_dataset(DatasetManifest(name, 1, role, tuple(entries)))

    def commit_version(
        self,
        parent_id: Digest,
        entries: list[DatasetEntry] | tuple[DatasetEntry, ...],
        role: str | None = None,
    ) -> Digest:
        parent = self.checkout_dataset(parent_id, verify=False)
        return self.commit_dataset(
            DatasetManifest(
                name=parent.name,
                version=parent.version + 1,
                role=role or parent.role,
                entries=tuple(entries),
                parent=parent_id,
            )
        )

    def checkout_dataset(self, dataset_id: Digest, verify: bool = True) -> DatasetManifest:
        """Load a committed manifest; with verify, re-hash every referenced object."""
        try:
            manifest = DatasetManifest.from_canonical(self.store.get_json(dataset_id))
        except NotFoundError:
            raise NotFoundError(f"unknown dataset: {dataset_id.hex}") from None
        if verify:
            for entry in manifest.entries:
                self.store.get(entry.image)      # raises IntegrityError naming the digest
                self.store.get(entry.annotation)
        return manifest

    def dataset_tip(self, name: str) -> Digest:
        return self.store.get_ref("datasets", name)

    def dataset_history(self, dataset_id: Digest) -> list[Digest]:
        """Version chain from the given id back to the root, newest first."""
        chain = [dataset_id]
        manifest = self.checkout_dataset(dataset_id, verify=False)
        while manifest.parent is not None:
            chain.append(manifest.parent)
            manifest = self.checkout_dataset(manifest.parent, verify=False)
        return chain

    def diff_datasets(self, a: Digest, b: Digest) -> DatasetDiff:
        map_a = self.checkout_dataset(a, verify=False).entry_map()
        map_b = self.checkout_dataset(b, verify=False).entry_map()
        added = sorted(set(map_b) - set(map_a))
        removed = sorted(set(map_a) - set(map_b))
        changed = sorted(
            (img, map_a[img], map_b[img])
            for img in set(map_a) & set(map_b)
            if map_a[img] != map_b[img]
        )
        return DatasetDiff(tuple(added), tuple(removed), tuple(changed))

    def verify_disjoint(self, dev_ids: list[Digest], cert_id: Digest) -> DisjointnessReport:
        """Check the dev/cert split: no shared images and no shared flights."""
        cert = self.checkout_dataset(cert_id, verify=False)
        cert_images = {e.image.hex for e in cert.entries}
        cert_flights = {self.image_meta(e.image).flight_id for e in cert.entries}
        image_overlap: set[str] = set()
        flight_overlap: set[str] = set()
        for dev_id in dev_ids:
            dev = self.checkout_dataset(dev_id, verify=False)
            for entry in dev.entries:
                if entry.image.hex in cert_images:
                    image_overlap.add(entry.image.hex)
                flight = self.image_meta(entry.image).flight_id
                if flight in cert_flights:
                    flight_overlap.add(flight)
        return DisjointnessReport(tuple(sorted(image_overlap)), tuple(sorted(flight_overlap)))

    # -- auto-label import -----------------------------------------------------

    def import_autolabels(
        self, path: str | Path, author: str = "auto", created_at: str = "1970-01-01T00:00:00Z"
    ) -> list[Digest]:
        """Import machine-produced boxes: one JSON object per line, source=auto."""
        ids: list[Digest] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"invalid JSON: {exc.msg}", line=lineno) from None
                try:
                    image = Digest(obj["image"])
                    boxes = tuple(
                        BoundingBox(
                            x=parse_decimal(b["x"]),
                            y=parse_decimal(b["y"]),
                            w=parse_decimal(b["w"]),
                            h=parse_decimal(b["h"]),
                            class_label=b["class"],
                            source="auto",
                        )
                        for b in obj.get("boxes", [])
                    )
                    record = AnnotationRecord(
                        image_digest=image,
                        boxes=boxes,
                        attributes=obj.get("attributes", {}),
                        author=author,
                        created_at=created_at,
                    )
                except KeyError as exc:
                    raise FormatError(f"missing field {exc.args[0]!r}", line=lineno) from None
                except ValidationError as exc:
                    raise FormatError(str(exc), line=lineno) from None
                try:
                    ids.append(self.commit_annotation(record))
                except (NotFoundError, ValidationError) as exc:
                    raise FormatError(str(exc), line=lineno) from None
        return ids

    # -- referential closure -----------------------------------------------------

    def verify_references(self) -> list[tuple[str, str]]:
        """Return (referrer, missing target) pairs across all stored manifests."""
        missing: list[tuple[str, str]] = []

        def check(referrer: str, target_hex: str | None):
            if target_hex and not self.store.exists(Digest(target_hex)):
                missing.append((referrer, target_hex))

        for obj in self.store.objects():
            if obj.kind == "annotation":
                rec = self.store.get_json(obj.digest)
                check(obj.digest.hex, rec["image"])
                check(obj.digest.hex, rec.get("parent"))
            elif obj.kind == "dataset-manifest":
                rec = self.store.get_json(obj.digest)
                check(obj.digest.hex, rec.get("parent"))
                for entry in rec["entries"]:
                    check(obj.digest.hex, entry["image"])
                    check(obj.digest.hex, entry["annotation"])
            elif obj.kind == "image-meta":
                rec = self.store.get_json(obj.digest)
                check(obj.digest.hex, rec["image"])
            elif obj.kind == "model-manifest":
                rec = self.store.get_json(obj.digest)
                check(obj.digest.hex, rec["model_file"])
                check(obj.digest.hex, rec["training_code_trace"])
                check(obj.digest.hex, rec.get("initial_weights"))
                check(obj.digest.hex, rec.get("parent_model"))
                for ds in rec["train_datasets"] + rec["eval_datasets"]:
                    check(obj.digest.hex, ds)
            elif obj.kind == "prediction-set":
                rec = self.store.get_json(obj.digest)
                check(obj.digest.hex, rec["dataset"])
                check(obj.digest.hex, rec.get("model_manifest"))
            elif obj.kind == "evaluation-report":
                rec = self.store.get_json(obj.digest)
                for key in ("prediction_set", "dataset", "domain_spec", "requirement_spec"):
                    check(obj.digest.hex, rec.get(key))
        return missing
