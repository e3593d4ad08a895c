"""Detection-metric engine: IOU, greedy matching, precision/recall sweeps,
exact interpolated average precision, per-partition sensitivity, and
requirement checking.

Conventions, fixed for determinism and auditability:

  * Matching processes detections in strictly descending confidence,
    breaking ties by ascending detection input index. A detection claims
    the unmatched same-class ground-truth box of highest IOU, provided
    that IOU meets the threshold; IOU ties go to the lowest ground-truth
    index.
  * The precision/recall sweep is global over the dataset, ordered by
    descending confidence with ties broken by dataset image order then
    detection input index.
  * Average precision integrates the interpolated precision envelope
    p(r) = max over sweep points with recall >= r of precision, exactly,
    using rational arithmetic. A class with no ground truth has no AP
    (reported absent, never coerced to 0 or 1).
  * Operating-point rates: false positives per image and missed-ground-truth
    fraction, both measured at the configured operating confidence.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .canonical import canonical_dumps, fmt_decimal, parse_decimal
from .datasets import AnnotationRecord, BoundingBox, DatasetManifest, ImageMeta
from .domain import OperationalDomainSpec, _coerce_numeric, sample_value
from .errors import FormatError, NotFoundError, ValidationError
from .store import Digest

log = logging.getLogger(__name__)


# -- geometry -------------------------------------------------------------------


def _rect(box) -> tuple[float, float, float, float]:
    if isinstance(box, (tuple, list)):
        x, y, w, h = box
    else:
        x, y, w, h = box.x, box.y, box.w, box.h
    if w <= 0 or h <= 0:
        raise ValidationError(f"box size must be positive, got w={w}, h={h}")
    return float(x), float(y), float(w), float(h)


def iou(a, b) -> float:
    """Intersection over union of two axis-aligned boxes (x, y, w, h)."""
    ax, ay, aw, ah = _rect(a)
    bx, by, bw, bh = _rect(b)
    ix = min(ax + aw, bx + bw) - max(ax, bx)
    iy = min(ay + ah, by + bh) - max(ay, by)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union


# -- detections and matching ------------------------------------------------------


@dataclass(frozen=True)
class Detection:
    x: float
    y: float
    w: float
    h: float
    class_label: str
    confidence: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValidationError(f"detection size must be positive, got w={self.w}, h={self.h}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence must be in [0,1], got {self.confidence}")

    def to_canonical(self) -> dict:
        return {
            "x": fmt_decimal(self.x),
            "y": fmt_decimal(self.y),
            "w": fmt_decimal(self.w),
            "h": fmt_decimal(self.h),
            "class": self.class_label,
            "confidence": fmt_decimal(self.confidence),
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "Detection":
        return cls(
            x=parse_decimal(obj["x"]),
            y=parse_decimal(obj["y"]),
            w=parse_decimal(obj["w"]),
            h=parse_decimal(obj["h"]),
            class_label=obj["class"],
            confidence=parse_decimal(obj["confidence"]),
        )


@dataclass(frozen=True)
class DetectionMatch:
    det_index: int
    gt_index: int | None  # None: false positive
    iou: float            # IOU with the matched box, or best candidate seen


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[DetectionMatch, ...]  # ordered by detection input index
    gt_matched: tuple[bool, ...]

    def matched_gt_of(self, det_index: int) -> int | None:
        return self.pairs[det_index].gt_index


def match_detections(
    gt: list[BoundingBox] | tuple,
    detections: list[Detection] | tuple,
    iou_threshold: float,
) -> MatchResult:
    """Greedy one-to-one matching of detections to same-class ground truth."""
    if not 0.0 < iou_threshold <= 1.0:
        raise ValidationError(f"iou_threshold must be in (0,1], got {iou_threshold}")
    order = sorted(range(len(detections)), key=lambda i: (-detections[i].confidence, i))
    gt_taken = [False] * len(gt)
    pairs: list[DetectionMatch | None] = [None] * len(detections)
    for i in order:
        det = detections[i]
        best_j = None
        best_iou = 0.0
        for j, box in enumerate(gt):
            if gt_taken[j] or box.class_label != det.class_label:
                continue
            value = iou(det, box)
            if value > best_iou:
                best_iou = value
                best_j = j
        if best_j is not None and best_iou >= iou_threshold:
            gt_taken[best_j] = True
            pairs[i] = DetectionMatch(i, best_j, best_iou)
        else:
            pairs[i] = DetectionMatch(i, None, best_iou)
    return MatchResult(tuple(pairs), tuple(gt_taken))


# -- precision/recall and average precision ------------------------------------------


@dataclass(frozen=True)
class PRCurve:
    """Points of a global descending-confidence sweep.

    ``tp_cumulative[k]`` is the true-positive count after the (k+1)-th
    detection; the float ``points`` are derived for reporting, while AP
    integrates the integer counts exactly.
    """

    points: tuple[tuple[float, float], ...]  # (recall, precision)
    tp_cumulative: tuple[int, ...]
    n_groundtruth: int
    n_detections: int


def pr_curve(scored: list[tuple[float, bool]], n_groundtruth: int) -> PRCurve:
    """Build the sweep from (confidence, is_true_positive) records.

    The input list order is the tie order: records are stably sorted by
    descending confidence, so equal confidences keep their input sequence.
    """
    if n_groundtruth < 1:
        raise ValidationError("PR curve undefined without ground truth")
    ordered = sorted(scored, key=lambda rec: -rec[0])
    points = []
    tp_cum = []
    tp = 0
    for k, (_, is_tp) in enumerate(ordered, start=1):
        if is_tp:
            tp += 1
        tp_cum.append(tp)
        points.append((tp / n_groundtruth, tp / k))
    return PRCurve(tuple(points), tuple(tp_cum), n_groundtruth, len(ordered))


def average_precision(curve: PRCurve) -> float:
    """Exact area under the interpolated-precision envelope.

    Walks the sweep from the last point backwards keeping the running
    precision maximum; every recall increment contributes
    (r_k - r_{k-1}) * max precision at recall >= r_k. Rational arithmetic
    keeps the result exact before the final float conversion.
    """
    if curve.n_detections == 0:
        return 0.0
    n_gt = curve.n_groundtruth
    ap = Fraction(0)
    max_prec = Fraction(0)
    for k in range(curve.n_detections, 0, -1):
        tp_k = curve.tp_cumulative[k - 1]
        tp_prev = curve.tp_cumulative[k - 2] if k >= 2 else 0
        max_prec = max(max_prec, Fraction(tp_k, k))
        if tp_k > tp_prev:
            ap += (Fraction(tp_k, n_gt) - Fraction(tp_prev, n_gt)) * max_prec
    return float(ap)


# -- prediction sets ---------------------------------------------------------------


@dataclass(frozen=True)
class PredictionSet:
    """Per-image detections of one model run over one dataset.

    ``model_manifest`` is optional: imported or synthetic predictions may
    not carry provenance, and every check that needs it degrades to a
    warning when it is absent.
    """

    dataset: Digest
    images: tuple[tuple[str, tuple[Detection, ...]], ...]  # sorted by image hex
    model_manifest: Digest | None = None

    def detections_for(self, image_hex: str) -> tuple[Detection, ...]:
        for hex_, dets in self.images:
            if hex_ == image_hex:
                return dets
        return ()

    def to_canonical(self) -> dict:
        return {
            "dataset": self.dataset.hex,
            "model_manifest": self.model_manifest.hex if self.model_manifest else None,
            "images": [
                {"image": hex_, "detections": [d.to_canonical() for d in dets]}
                for hex_, dets in self.images
            ],
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "PredictionSet":
        return cls(
            dataset=Digest(obj["dataset"]),
            model_manifest=(
                Digest(obj["model_manifest"]) if obj.get("model_manifest") else None
            ),
            images=tuple(
                (img["image"], tuple(Detection.from_canonical(d) for d in img["detections"]))
                for img in obj["images"]
            ),
        )

    @property
    def prediction_set_id(self) -> Digest:
        return Digest.of_bytes(canonical_dumps(self.to_canonical()))


def load_predictions(
    path: str | Path,
    manifest: DatasetManifest,
    model_manifest: Digest | None = None,
) -> PredictionSet:
    """Parse a prediction import file (one JSON object per line) against a dataset."""
    dataset_images = {e.image.hex for e in manifest.entries}
    per_image: dict[str, tuple[Detection, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", line=lineno) from None
            image_hex = obj.get("image")
            if not isinstance(image_hex, str):
                raise FormatError("missing 'image' digest", line=lineno)
            if image_hex not in dataset_images:
                raise FormatError(
                    f"image {image_hex} is not in dataset (version {manifest.version})",
                    line=lineno,
                )
            if image_hex in per_image:
                raise FormatError(f"duplicate line for image {image_hex}", line=lineno)
            try:
                dets = tuple(
                    Detection(
                        x=parse_decimal(d["x"]),
                        y=parse_decimal(d["y"]),
                        w=parse_decimal(d["w"]),
                        h=parse_decimal(d["h"]),
                        class_label=d["class"],
                        confidence=parse_decimal(d["confidence"]),
                    )
                    for d in obj.get("detections", [])
                )
            except KeyError as exc:
                raise FormatError(f"missing field {exc.args[0]!r}", line=lineno) from None
            except ValidationError as exc:
                raise FormatError(str(exc), line=lineno) from None
            per_image[image_hex] = dets
    return PredictionSet(
        dataset=Digest.of_bytes(canonical_dumps(manifest.to_canonical())),
        images=tuple(sorted(per_image.items())),
        model_manifest=model_manifest,
    )


# -- requirement specs --------------------------------------------------------------


@dataclass(frozen=True)
class PartitionMinimum:
    dimension: str
    bin: int
    min_ap: float


@dataclass(frozen=True)
class RequirementSpec:
    iou_threshold: float = 0.5
    operating_confidence: float = 0.5
    min_map: float | None = None
    max_fp_per_image: float | None = None
    max_fn_rate: float | None = None
    partition_minima: tuple[PartitionMinimum, ...] = ()
    require_dataset_role: str | None = None

    def __post_init__(self):
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValidationError(f"iou_threshold must be in (0,1], got {self.iou_threshold}")
        if not 0.0 <= self.operating_confidence <= 1.0:
            raise ValidationError(
                f"operating_confidence must be in [0,1], got {self.operating_confidence}"
            )
        if (
            self.min_map is None
            and self.max_fp_per_image is None
            and self.max_fn_rate is None
            and not self.partition_minima
        ):
            raise ValidationError("requirement spec must contain at least one criterion")

    def to_canonical(self) -> dict:
        return {
            "iou_threshold": fmt_decimal(self.iou_threshold),
            "operating_confidence": fmt_decimal(self.operating_confidence),
            "min_map": fmt_decimal(self.min_map) if self.min_map is not None else None,
            "max_fp_per_image": (
                fmt_decimal(self.max_fp_per_image) if self.max_fp_per_image is not None else None
            ),
            "max_fn_rate": (
                fmt_decimal(self.max_fn_rate) if self.max_fn_rate is not None else None
            ),
            "partition_minima": [
                {"dimension": p.dimension, "bin": p.bin, "min_ap": fmt_decimal(p.min_ap)}
                for p in self.partition_minima
            ],
            "require_dataset_role": self.require_dataset_role,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "RequirementSpec":
        def opt(key):
            return parse_decimal(obj[key]) if obj.get(key) is not None else None

        return cls(
            iou_threshold=parse_decimal(obj.get("iou_threshold", 0.5)),
            operating_confidence=parse_decimal(obj.get("operating_confidence", 0.5)),
            min_map=opt("min_map"),
            max_fp_per_image=opt("max_fp_per_image"),
            max_fn_rate=opt("max_fn_rate"),
            partition_minima=tuple(
                PartitionMinimum(p["dimension"], p["bin"], parse_decimal(p["min_ap"]))
                for p in obj.get("partition_minima", [])
            ),
            require_dataset_role=obj.get("require_dataset_role"),
        )

    @property
    def spec_id(self) -> Digest:
        return Digest.of_bytes(canonical_dumps(self.to_canonical()))


def load_requirement_spec(path: str | Path) -> RequirementSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"requirement spec is not valid JSON: {exc.msg}") from None
    return RequirementSpec.from_obj(obj)


# -- evaluation ----------------------------------------------------------------------


@dataclass(frozen=True)
class ImageEval:
    image_hex: str
    meta: ImageMeta
    record: AnnotationRecord
    detections: tuple[Detection, ...]
    match: MatchResult


def prepare_image_evals(
    repo, manifest: DatasetManifest, predictions: PredictionSet, iou_threshold: float
) -> list[ImageEval]:
    """Match every image of the dataset at the given IOU threshold.

    Iterates entries in canonical manifest order so downstream sweeps are
    deterministic regardless of how the prediction file was written.
    """
    pred_map = dict(predictions.images)
    evals = []
    for entry in sorted(manifest.entries, key=lambda e: e.image.hex):
        record = repo.get_annotation(entry.annotation)
        meta = repo.image_meta(entry.image)
        dets = pred_map.get(entry.image.hex, ())
        evals.append(
            ImageEval(
                image_hex=entry.image.hex,
                meta=meta,
                record=record,
                detections=dets,
                match=match_detections(record.boxes, dets, iou_threshold),
            )
        )
    return evals


@dataclass(frozen=True)
class OverallMetrics:
    ap_per_class: dict[str, float]
    mean_ap: float | None
    fp_per_image: float
    fn_rate: float
    n_images: int
    n_groundtruth: int
    n_detections: int


@dataclass(frozen=True)
class PartitionBin:
    bin: int
    label: str
    ap: float | None  # None when the bin has no ground truth
    n_gt: int
    n_images: int


@dataclass(frozen=True)
class RequirementRow:
    name: str
    threshold: float
    observed: float
    passed: bool


@dataclass(frozen=True)
class EvaluationReport:
    prediction_set: Digest
    dataset: Digest
    model_manifest: Digest | None
    domain_spec: Digest
    requirement_spec: Digest
    iou_threshold: float
    operating_confidence: float
    overall: OverallMetrics
    partitions: dict[str, tuple[PartitionBin, ...]]
    requirements: tuple[RequirementRow, ...]
    requirements_pass: bool
    warnings: tuple[str, ...] = ()

    def to_canonical(self) -> dict:
        return {
            "prediction_set": self.prediction_set.hex,
            "dataset": self.dataset.hex,
            "model_manifest": self.model_manifest.hex if self.model_manifest else None,
            "domain_spec": self.domain_spec.hex,
            "requirement_spec": self.requirement_spec.hex,
            "iou_threshold": fmt_decimal(self.iou_threshold),
            "operating_confidence": fmt_decimal(self.operating_confidence),
            "overall": {
                "ap_per_class": {
                    cls: fmt_decimal(ap) for cls, ap in sorted(self.overall.ap_per_class.items())
                },
                "map": fmt_decimal(self.overall.mean_ap) if self.overall.mean_ap is not None else None,
                "fp_per_image": fmt_decimal(self.overall.fp_per_image),
                "fn_rate": fmt_decimal(self.overall.fn_rate),
                "n_images": self.overall.n_images,
                "n_groundtruth": self.overall.n_groundtruth,
                "n_detections": self.overall.n_detections,
            },
            "partitions": {
                dim: [
                    {
                        "bin": b.bin,
                        "label": b.label,
                        "ap": fmt_decimal(b.ap) if b.ap is not None else None,
                        "n_gt": b.n_gt,
                        "n_images": b.n_images,
                    }
                    for b in bins
                ]
                for dim, bins in self.partitions.items()
            },
            "requirements": [
                {
                    "name": r.name,
                    "threshold": fmt_decimal(r.threshold),
                    "observed": fmt_decimal(r.observed),
                    "pass": r.passed,
                }
                for r in self.requirements
            ],
            "requirements_pass": self.requirements_pass,
            "warnings": list(self.warnings),
        }

    @property
    def report_id(self) -> Digest:
        return Digest.of_bytes(canonical_dumps(self.to_canonical()))


def _class_sweeps(evals: list[ImageEval]) -> tuple[dict[str, float], float | None, int]:
    """Per-class AP over the full confidence sweep; returns (ap per class, mean, n_gt)."""
    classes = sorted({b.class_label for ev in evals for b in ev.record.boxes})
    ap_per_class: dict[str, float] = {}
    n_gt_total = 0
    for cls in classes:
        n_gt = sum(1 for ev in evals for b in ev.record.boxes if b.class_label == cls)
        n_gt_total += n_gt
        scored = [
            (det.confidence, ev.match.pairs[i].gt_index is not None)
            for ev in evals
            for i, det in enumerate(ev.detections)
            if det.class_label == cls
        ]
        ap_per_class[cls] = average_precision(pr_curve(scored, n_gt)) if n_gt else 0.0
    mean_ap = sum(ap_per_class.values()) / len(ap_per_class) if ap_per_class else None
    return ap_per_class, mean_ap, n_gt_total


def operating_point_counts(
    evals: list[ImageEval], operating_confidence: float
) -> tuple[int, int]:
    """(false positives, missed ground truths) at the operating confidence."""
    fp = 0
    matched_gt = 0
    for ev in evals:
        for i, det in enumerate(ev.detections):
            if det.confidence < operating_confidence:
                continue
            if ev.match.pairs[i].gt_index is None:
                fp += 1
            else:
                matched_gt += 1
    n_gt = sum(len(ev.record.boxes) for ev in evals)
    return fp, n_gt - matched_gt


def sensitivity_by_partition(
    evals: list[ImageEval], dimension
) -> dict[int, PartitionBin]:
    """Per-bin AP for one domain dimension.

    Ground truths are restricted to the bin. Detections matched to
    out-of-bin ground truth are ignored (neither TP nor FP). An unmatched
    detection counts as a false positive for a bin only when its image
    contains ground truth of that bin (box-unit dimensions) or when the
    image itself belongs to the bin (image-unit dimensions): false positives
    carry no intruder attributes of their own, so they are attributed by
    image context.
    """
    labels = dimension.bin_labels()
    result: dict[int, PartitionBin] = {}
    per_bin: dict[int, dict] = {
        i: {"scored_by_class": {}, "n_gt_by_class": {}, "images": 0} for i in range(len(dimension.bins))
    }
    for ev in evals:
        value = sample_value(ev.meta, ev.record, dimension.name)
        if dimension.kind == "numeric":
            value = _coerce_numeric(value)
        bin_idx = dimension.bin_of(value) if value is not None else None
        if bin_idx is None:
            continue
        # All of this image's ground truth shares the record-level attribute,
        # so the image context decides FP attribution for both units.
        has_gt = len(ev.record.boxes) > 0
        counts_for_bin = has_gt if dimension.unit == "box" else True
        if not counts_for_bin:
            continue
        slot = per_bin[bin_idx]
        slot["images"] += 1
        for box in ev.record.boxes:
            slot["n_gt_by_class"][box.class_label] = (
                slot["n_gt_by_class"].get(box.class_label, 0) + 1
            )
        for i, det in enumerate(ev.detections):
            matched = ev.match.pairs[i].gt_index is not None
            # Matched detections are in-bin TPs here (their GT lives in this
            # image); unmatched ones are the FPs attributed by image context.
            slot["scored_by_class"].setdefault(det.class_label, []).append(
                (det.confidence, matched)
            )
    for bin_idx, slot in per_bin.items():
        n_gt = sum(slot["n_gt_by_class"].values())
        if n_gt == 0:
            result[bin_idx] = PartitionBin(bin_idx, labels[bin_idx], None, 0, slot["images"])
            continue
        aps = []
        for cls, cls_gt in sorted(slot["n_gt_by_class"].items()):
            scored = slot["scored_by_class"].get(cls, [])
            aps.append(average_precision(pr_curve(scored, cls_gt)))
        result[bin_idx] = PartitionBin(
            bin_idx, labels[bin_idx], sum(aps) / len(aps), n_gt, slot["images"]
        )
    return result


def check_requirements(
    spec: RequirementSpec,
    mean_ap: float | None,
    fp_per_image: float,
    fn_rate: float,
    partitions: dict[str, dict[int, PartitionBin]],
) -> list[RequirementRow]:
    rows: list[RequirementRow] = []
    if spec.min_map is not None:
        if mean_ap is None:
            raise ValidationError("min_map requirement set but mAP is undefined (no ground truth)")
        rows.append(RequirementRow("min_map", spec.min_map, mean_ap, mean_ap >= spec.min_map))
    if spec.max_fp_per_image is not None:
        rows.append(
            RequirementRow(
                "max_fp_per_image",
                spec.max_fp_per_image,
                fp_per_image,
                fp_per_image <= spec.max_fp_per_image,
            )
        )
    if spec.max_fn_rate is not None:
        rows.append(
            RequirementRow("max_fn_rate", spec.max_fn_rate, fn_rate, fn_rate <= spec.max_fn_rate)
        )
    for pm in spec.partition_minima:
        bins = partitions.get(pm.dimension)
        if bins is None or pm.bin not in bins:
            raise ValidationError(
                f"requirement references unknown partition {pm.dimension!r} bin {pm.bin}"
            )
        cell = bins[pm.bin]
        if cell.ap is None:
            raise ValidationError(
                f"partition {pm.dimension!r} bin {pm.bin} has no ground truth; "
                "its AP requirement cannot be evaluated"
            )
        rows.append(
            RequirementRow(
                f"min_ap:{pm.dimension}[{pm.bin}]", pm.min_ap, cell.ap, cell.ap >= pm.min_ap
            )
        )
    return rows


def evaluate(
    repo,
    predictions: PredictionSet,
    requirements: RequirementSpec,
    domain: OperationalDomainSpec,
) -> EvaluationReport:
    """Full evaluation: metrics, partition sensitivity, requirement rows.

    Stores the prediction set, both specs, and the resulting report
    content-addressed, so every digest in the report resolves.
    """
    manifest = repo.checkout_dataset(predictions.dataset, verify=False)
    dataset_images = {e.image.hex for e in manifest.entries}
    for image_hex, _ in predictions.images:
        if image_hex not in dataset_images:
            raise ValidationError(f"prediction image {image_hex} is not in the dataset")

    warnings: list[str] = []
    if requirements.require_dataset_role and manifest.role != requirements.require_dataset_role:
        raise ValidationError(
            f"requirements demand a {requirements.require_dataset_role!r} dataset, "
            f"got role {manifest.role!r}"
        )
    if predictions.model_manifest is not None:
        model = repo.store.get_json(predictions.model_manifest)
        if predictions.dataset.hex in model["train_datasets"]:
            msg = "evaluating on a dataset used for training; results are not independent"
            warnings.append(msg)
            log.warning(msg)

    evals = prepare_image_evals(repo, manifest, predictions, requirements.iou_threshold)
    ap_per_class, mean_ap, n_gt = _class_sweeps(evals)
    fp, fn = operating_point_counts(evals, requirements.operating_confidence)
    n_images = len(evals)
    n_detections = sum(len(ev.detections) for ev in evals)

    partitions: dict[str, dict[int, PartitionBin]] = {
        dim.name: sensitivity_by_partition(evals, dim) for dim in domain.dimensions
    }
    rows = check_requirements(
        requirements,
        mean_ap,
        fp / n_images if n_images else 0.0,
        fn / n_gt if n_gt else 0.0,
        partitions,
    )

    report = EvaluationReport(
        prediction_set=repo.store.put_json(predictions.to_canonical(), "prediction-set"),
        dataset=predictions.dataset,
        model_manifest=predictions.model_manifest,
        domain_spec=repo.store.put_json(domain.to_canonical(), "domain-spec"),
        requirement_spec=repo.store.put_json(requirements.to_canonical(), "requirement-spec"),
        iou_threshold=requirements.iou_threshold,
        operating_confidence=requirements.operating_confidence,
        overall=OverallMetrics(
            ap_per_class=ap_per_class,
            mean_ap=mean_ap,
            fp_per_image=fp / n_images if n_images else 0.0,
            fn_rate=fn / n_gt if n_gt else 0.0,
            n_images=n_images,
            n_groundtruth=n_gt,
            n_detections=n_detections,
        ),
        partitions={
            name: tuple(bins[i] for i in sorted(bins)) for name, bins in partitions.items()
        },
        requirements=tuple(rows),
        requirements_pass=all(r.passed for r in rows),
        warnings=tuple(warnings),
    )
    repo.store.put_json(report.to_canonical(), "evaluation-report")
    return report


def load_evaluation_report(repo, report_id: Digest) -> dict:
    """Raw canonical document of a stored evaluation report."""
    try:
        return repo.store.get_json(report_id)
    except NotFoundError:
        raise NotFoundError(f"unknown evaluation report: {report_id.hex}") from None
