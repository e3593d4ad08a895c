"""Deterministic synthetic encounter and prediction generator.

Produces desk-scale fixtures for the full pipeline: procedurally generated
placeholder images, annotations carrying range/sequence attributes, and a
prediction file sampled from a configurable detector model (per-range-bin
detection probability and confidence, localization noise, spurious
detections). Output is a pure function of the config: the random stream is
Philox keyed by (seed, encounter index), images embed their own indices,
and all timestamps are derived from the config, so identical configs yield
identical dataset ids and identical prediction bytes.

The intruder's apparent size scales as 1/range, so range bins are
recoverable from box size; a target at twice the distance is half the size.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .canonical import canonical_dumps, fmt_decimal, parse_decimal
from .datasets import AnnotationRecord, BoundingBox, DatasetEntry, ImageMeta
from .domain import DomainDimension
from .errors import FormatError, ValidationError
from .store import Digest

_TIME_OF_DAY = ("day", "dusk", "night", "dawn")
_EPOCH = "2026-01-01T{hour:02d}:{minute:02d}:{second:02d}Z"


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int = 7
    n_encounters: int = 10
    frames_per_encounter: int = 130
    image_width: int = 64
    image_height: int = 48
    range_start_m: float = 150.0
    range_end_m: float = 1450.0
    range_bins: tuple[tuple[float, float], ...] = (
        (0.0, 375.0),
        (375.0, 750.0),
        (750.0, 1115.0),
        (1115.0, 1500.0),
    )
    p_detect: tuple[float, ...] = (0.95, 0.85, 0.6, 0.3)
    confidence_mean: tuple[float, ...] = (0.92, 0.8, 0.65, 0.45)
    confidence_std: float = 0.04
    localization_noise_px: float = 0.4
    fp_rate_per_image: float = 0.1
    fp_confidence: tuple[float, float] = (0.05, 0.5)
    size_constant_px_m: float = 6000.0
    class_label: str = "airplane"
    dataset_name: str = "synthetic-encounters"
    dataset_role: str = "certification"
    camera_id: str = "synthetic-cam"

    def __post_init__(self):
        if self.n_encounters < 1 or self.frames_per_encounter < 1:
            raise ValidationError("need at least one encounter and one frame")
        if self.image_width < 8 or self.image_height < 8:
            raise ValidationError("image must be at least 8x8 pixels")
        if self.range_start_m <= 0 or self.range_end_m <= 0:
            raise ValidationError("ranges must be positive")
        if len(self.p_detect) != len(self.range_bins):
            raise ValidationError("p_detect must have one entry per range bin")
        if len(self.confidence_mean) != len(self.range_bins):
            raise ValidationError("confidence_mean must have one entry per range bin")
        if any(not 0.0 <= p <= 1.0 for p in self.p_detect):
            raise ValidationError("detection probabilities must be in [0,1]")
        if self.localization_noise_px < 0 or self.fp_rate_per_image < 0:
            raise ValidationError("noise and FP rate must be non-negative")

    def range_dimension(self) -> DomainDimension:
        return DomainDimension(
            name="intruder_range_m",
            kind="numeric",
            bins=self.range_bins,
            min_count=tuple([0] * len(self.range_bins)),
            unit="box",
        )

    def to_canonical(self) -> dict:
        return {
            "seed": self.seed,
            "n_encounters": self.n_encounters,
            "frames_per_encounter": self.frames_per_encounter,
            "image_width": self.image_width,
            "image_height": self.image_height,
            "range_start_m": fmt_decimal(self.range_start_m),
            "range_end_m": fmt_decimal(self.range_end_m),
            "range_bins": [[fmt_decimal(lo), fmt_decimal(hi)] for lo, hi in self.range_bins],
            "p_detect": [fmt_decimal(p) for p in self.p_detect],
            "confidence_mean": [fmt_decimal(c) for c in self.confidence_mean],
            "confidence_std": fmt_decimal(self.confidence_std),
            "localization_noise_px": fmt_decimal(self.localization_noise_px),
            "fp_rate_per_image": fmt_decimal(self.fp_rate_per_image),
            "fp_confidence": [fmt_decimal(c) for c in self.fp_confidence],
            "size_constant_px_m": fmt_decimal(self.size_constant_px_m),
            "class_label": self.class_label,
            "dataset_name": self.dataset_name,
            "dataset_role": self.dataset_role,
            "camera_id": self.camera_id,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SyntheticConfig":
        kwargs = {}
        int_keys = ("seed", "n_encounters", "frames_per_encounter", "image_width", "image_height")
        real_keys = (
            "range_start_m",
            "range_end_m",
            "confidence_std",
            "localization_noise_px",
            "fp_rate_per_image",
            "size_constant_px_m",
        )
        str_keys = ("class_label", "dataset_name", "dataset_role", "camera_id")
        for key in int_keys:
            if key in obj:
                kwargs[key] = int(obj[key])
        for key in real_keys:
            if key in obj:
                kwargs[key] = parse_decimal(obj[key])
        for key in str_keys:
            if key in obj:
                kwargs[key] = obj[key]
        if "range_bins" in obj:
            kwargs["range_bins"] = tuple(
                (parse_decimal(lo), parse_decimal(hi)) for lo, hi in obj["range_bins"]
            )
        for key in ("p_detect", "confidence_mean", "fp_confidence"):
            if key in obj:
                kwargs[key] = tuple(parse_decimal(v) for v in obj[key])
        return cls(**kwargs)


def load_synthetic_config(path: str | Path) -> SyntheticConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"synthetic config is not valid JSON: {exc.msg}") from None
    return SyntheticConfig.from_obj(obj)


def _encounter_rng(config: SyntheticConfig, encounter: int) -> np.random.Generator:
    # Philox is counter-based and keyed per encounter, so encounters are
    # independent streams and the whole run is reproducible from the seed.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((config.seed, encounter))))


def _render_image(config: SyntheticConfig, encounter: int, frame: int, box) -> bytes:
    h, w = config.image_height, config.image_width
    yy = np.linspace(0, 96, h, dtype=np.float64)[:, None]
    xx = np.linspace(0, 96, w, dtype=np.float64)[None, :]
    arr = ((yy + xx) / 2 + 16).astype(np.uint8)
    # First row encodes (seed, encounter, frame) so every frame's bytes are unique.
    tag = np.frombuffer(
        np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF).tobytes()
        + np.uint32(encounter).tobytes()
        + np.uint32(frame).tobytes(),
        dtype=np.uint8,
    )
    arr[0, : tag.size] = tag
    if box is not None:
        x, y, s = box
        x0, y0 = int(x), int(y)
        x1, y1 = min(w, int(np.ceil(x + s))), min(h, int(np.ceil(y + s)))
        arr[y0:y1, x0:x1] = 230
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def _timestamp(encounter: int, frame: int) -> str:
    total = frame
    return _EPOCH.format(hour=encounter % 24, minute=(total // 60) % 60, second=total % 60)


def generate(repo, config: SyntheticConfig, out_dir: str | Path) -> tuple[Digest, Path]:
    """Generate encounters, commit the ground-truth dataset, write predictions.

    Returns the committed dataset id and the prediction file path. The
    prediction file conforms to the prediction import format and lists one
    line per generated image, in generation order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    range_dim = config.range_dimension()
    w, h = config.image_width, config.image_height
    entries: list[DatasetEntry] = []
    prediction_lines: list[str] = []

    for encounter in range(config.n_encounters):
        rng = _encounter_rng(config, encounter)
        flight_id = f"SYN-F{encounter:03d}"
        sequence_id = f"SYN-E{encounter:03d}"
        callsign = f"N{encounter:03d}SY"
        time_of_day = _TIME_OF_DAY[encounter % len(_TIME_OF_DAY)]
        # Target path: random start, constant drift, clamped to the frame.
        cx = float(rng.uniform(w * 0.25, w * 0.75))
        cy = float(rng.uniform(h * 0.25, h * 0.75))
        vx = float(rng.uniform(-0.15, 0.15))
        vy = float(rng.uniform(-0.1, 0.1))

        n_frames = config.frames_per_encounter
        for frame in range(n_frames):
            if n_frames > 1:
                frac = frame / (n_frames - 1)
            else:
                frac = 0.0
            range_m = config.range_start_m + (config.range_end_m - config.range_start_m) * frac
            size = config.size_constant_px_m / range_m
            size = float(min(max(size, 2.0), min(w, h) * 0.8))
            x = min(max(cx + vx * frame - size / 2, 0.0), w - size)
            y = min(max(cy + vy * frame - size / 2, 0.0), h - size)

            data = _render_image(config, encounter, frame, (x, y, size))
            meta = repo.ingest_image(
                data,
                ImageMeta(
                    camera_id=config.camera_id,
                    flight_id=flight_id,
                    capture_time=_timestamp(encounter, frame),
                    sequence_id=sequence_id,
                    frame_index=frame,
                ),
            )
            gt_box = BoundingBox(x, y, size, size, config.class_label, source="auto")
            annotation_id = repo.commit_annotation(
                AnnotationRecord(
                    image_digest=meta.image_digest,
                    boxes=(gt_box,),
                    attributes={
                        "intruder_range_m": range_m,
                        "callsign": callsign,
                        "time_of_day": time_of_day,
                    },
                    author="synthgen",
                    created_at="2026-01-01T00:00:00Z",
                )
            )
            entries.append(DatasetEntry(meta.image_digest, annotation_id))

            detections = []
            bin_idx = range_dim.bin_of(range_m)
            p = config.p_detect[bin_idx] if bin_idx is not None else 0.0
            if float(rng.uniform()) < p:
                dx = float(rng.normal(0.0, config.localization_noise_px)) if config.localization_noise_px else 0.0
                dy = float(rng.normal(0.0, config.localization_noise_px)) if config.localization_noise_px else 0.0
                mean = config.confidence_mean[bin_idx] if bin_idx is not None else 0.5
                conf = float(np.clip(rng.normal(mean, config.confidence_std), 0.01, 0.99)) if config.confidence_std else mean
                detections.append(
                    {
                        "x": fmt_decimal(x + dx),
                        "y": fmt_decimal(y + dy),
                        "w": fmt_decimal(size),
                        "h": fmt_decimal(size),
                        "class": config.class_label,
                        "confidence": fmt_decimal(conf),
                    }
                )
            n_fp = int(rng.poisson(config.fp_rate_per_image)) if config.fp_rate_per_image else 0
            for _ in range(n_fp):
                fs = float(rng.uniform(3.0, 8.0))
                fx = float(rng.uniform(0.0, w - fs))
                fy = float(rng.uniform(0.0, h - fs))
                fconf = float(rng.uniform(config.fp_confidence[0], config.fp_confidence[1]))
                detections.append(
                    {
                        "x": fmt_decimal(fx),
                        "y": fmt_decimal(fy),
                        "w": fmt_decimal(fs),
                        "h": fmt_decimal(fs),
                        "class": config.class_label,
                        "confidence": fmt_decimal(fconf),
                    }
                )
            prediction_lines.append(
                json.dumps(
                    {"image": meta.image_digest.hex, "detections": detections},
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )

    dataset_id = repo.create_dataset(config.dataset_name, config.dataset_role, entries)
    predictions_path = out_dir / "predictions.jsonl"
    predictions_path.write_text("\n".join(prediction_lines) + "\n", encoding="utf-8")
    return dataset_id, predictions_path
