"""Frame-to-frame detection persistence and flicker quantification.

A flicker is a detected target disappearing and then reappearing: a maximal
run of undetected frames bounded on both sides by detected frames, counted
over the frames where the target is actually present. Leading and trailing
undetected runs are acquisition/loss gaps, not flicker.
"""

from __future__ import annotations

from dataclasses import dataclass

from .datasets import DatasetManifest
from .errors import ValidationError
from .evaluation import ImageEval, PredictionSet, prepare_image_evals


@dataclass(frozen=True)
class TimelineFrame:
    frame_index: int
    gt_present: bool
    detected: bool

    def __post_init__(self):
        if self.detected and not self.gt_present:
            raise ValidationError("detected implies gt_present; spurious detections are FPs")


@dataclass(frozen=True)
class TrackTimeline:
    sequence_id: str
    track_key: str | None  # callsign when multi-intruder sequences are split
    frames: tuple[TimelineFrame, ...]

    def __post_init__(self):
        indices = [f.frame_index for f in self.frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValidationError(
                f"sequence {self.sequence_id!r}: frame_index must be strictly increasing"
            )


@dataclass(frozen=True)
class StabilityRow:
    sequence_id: str
    track_key: str | None
    n_frames: int
    n_gt_frames: int
    detected_frames: int
    detection_rate: float
    flicker_events: int
    max_gap: int
    flicker_rate: float


def flicker_analysis(timeline: TrackTimeline) -> StabilityRow:
    """Count bounded undetected runs over the frames where the target exists."""
    present = [f.detected for f in timeline.frames if f.gt_present]
    n_gt_frames = len(present)
    detected_frames = sum(present)
    events = 0
    max_gap = 0
    gap = 0
    seen_detection = False
    for detected in present:
        if detected:
            if seen_detection and gap > 0:
                events += 1
                max_gap = max(max_gap, gap)
            seen_detection = True
            gap = 0
        elif seen_detection:
            gap += 1
        # undetected frames before the first detection are a leading gap
    return StabilityRow(
        sequence_id=timeline.sequence_id,
        track_key=timeline.track_key,
        n_frames=len(timeline.frames),
        n_gt_frames=n_gt_frames,
        detected_frames=detected_frames,
        detection_rate=detected_frames / n_gt_frames if n_gt_frames else 0.0,
        flicker_events=events,
        max_gap=max_gap,
        flicker_rate=events / max(1, n_gt_frames - 1),
    )


def build_timelines(
    repo,
    manifest: DatasetManifest,
    predictions: PredictionSet,
    iou_threshold: float = 0.5,
    operating_confidence: float = 0.5,
    evals: list[ImageEval] | None = None,
) -> list[TrackTimeline]:
    """One timeline per (sequence, target) over a dataset with sequence labels.

    Assumes one intruder per sequence unless the annotations carry a
    ``callsign`` attribute, in which case frames are grouped per callsign.
    A frame counts as detected when any of its ground-truth boxes is matched
    at the given IOU threshold by a detection at or above the operating
    confidence. Images without sequence metadata are skipped (a dataset with
    none yields an empty list).
    """
    if evals is None:
        evals = prepare_image_evals(repo, manifest, predictions, iou_threshold)
    groups: dict[tuple[str, str | None], list[ImageEval]] = {}
    for ev in evals:
        if ev.meta.sequence_id is None:
            continue
        callsign = ev.record.attributes.get("callsign")
        key = (ev.meta.sequence_id, callsign if isinstance(callsign, str) else None)
        groups.setdefault(key, []).append(ev)

    timelines = []
    for (sequence_id, track_key), members in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1] or "")):
        members.sort(key=lambda ev: ev.meta.frame_index)
        seen_frames = set()
        frames = []
        for ev in members:
            idx = ev.meta.frame_index
            if idx in seen_frames:
                raise ValidationError(
                    f"sequence {sequence_id!r}: duplicate frame_index {idx}"
                )
            seen_frames.add(idx)
            gt_present = len(ev.record.boxes) > 0
            detected = gt_present and any(
                pair.gt_index is not None and ev.detections[pair.det_index].confidence >= operating_confidence
                for pair in ev.match.pairs
            )
            frames.append(TimelineFrame(idx, gt_present, detected))
        timelines.append(TrackTimeline(sequence_id, track_key, tuple(frames)))
    return timelines


def stability_report(
    repo,
    manifest: DatasetManifest,
    predictions: PredictionSet,
    iou_threshold: float = 0.5,
    operating_confidence: float = 0.5,
) -> list[StabilityRow]:
    return [
        flicker_analysis(t)
        for t in build_timelines(repo, manifest, predictions, iou_threshold, operating_confidence)
    ]
