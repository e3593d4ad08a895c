import random

import pytest

from certkit import (
    AnnotationRecord,
    BoundingBox,
    DatasetEntry,
    Detection,
    PredictionSet,
    ValidationError,
    build_timelines,
    flicker_analysis,
)
from certkit.stability import TimelineFrame, TrackTimeline

from conftest import make_meta, make_png
from oracles import flicker_transitions


def timeline(bits, gt=None, sequence="S"):
    gt = gt if gt is not None else [1] * len(bits)
    frames = tuple(
        TimelineFrame(i, bool(g), bool(b and g)) for i, (b, g) in enumerate(zip(bits, gt))
    )
    return TrackTimeline(sequence, None, frames)


def test_flicker_simple_gap():
    row = flicker_analysis(timeline([1, 1, 0, 1, 1]))
    assert row.flicker_events == 1
    assert row.max_gap == 1
    assert row.detection_rate == pytest.approx(0.8)
    assert row.flicker_rate == pytest.approx(1 / 4)


def test_flicker_leading_gap_is_not_flicker():
    row = flicker_analysis(timeline([0, 0, 1, 1, 1]))
    assert row.flicker_events == 0
    assert row.detection_rate == pytest.approx(0.6)


def test_flicker_trailing_gap_is_not_flicker():
    row = flicker_analysis(timeline([1, 1, 1, 0, 0]))
    assert row.flicker_events == 0


def test_flicker_two_events():
    row = flicker_analysis(timeline([1, 0, 0, 1, 0, 1]))
    assert row.flicker_events == 2
    assert row.max_gap == 2
    assert flicker_transitions([1, 0, 0, 1, 0, 1]) == 2


def test_flicker_bounds_invariant():
    row = flicker_analysis(timeline([1, 0, 1, 0, 1, 0, 1]))
    assert row.flicker_events <= max(0, row.n_gt_frames - 1)


def test_flicker_reversal_symmetry_random():
    rng = random.Random(3)
    for _ in range(300):
        bits = [rng.randint(0, 1) for _ in range(rng.randint(0, 30))]
        forward = flicker_analysis(timeline(bits)).flicker_events
        backward = flicker_analysis(timeline(list(reversed(bits)))).flicker_events
        assert forward == backward


def test_flicker_concatenated_all_detected():
    row = flicker_analysis(timeline([1] * 6 + [1] * 6))
    assert row.flicker_events == 0
    assert row.detection_rate == 1.0


def test_flicker_matches_transition_oracle_random():
    rng = random.Random(41)
    for _ in range(500):
        bits = [rng.randint(0, 1) for _ in range(rng.randint(0, 50))]
        assert flicker_analysis(timeline(bits)).flicker_events == flicker_transitions(bits)


def test_flicker_only_counts_gt_frames():
    # frame 2 has no ground truth: the undetected frame between detections
    # is not a flicker because the target was absent
    frames = (
        TimelineFrame(0, True, True),
        TimelineFrame(1, True, True),
        TimelineFrame(2, False, False),
        TimelineFrame(3, True, True),
    )
    row = flicker_analysis(TrackTimeline("S", None, frames))
    assert row.flicker_events == 0
    assert row.n_gt_frames == 3
    assert row.n_frames == 4


def test_detected_requires_gt():
    with pytest.raises(ValidationError):
        TimelineFrame(0, False, True)


def test_frame_indices_strictly_increasing():
    with pytest.raises(ValidationError, match="increasing"):
        TrackTimeline(
            "S", None, (TimelineFrame(1, True, False), TimelineFrame(1, True, False))
        )


# -- timeline construction over a repository -------------------------------------------


def build_sequence_fixture(repo, frames_spec, start_tag=800):
    """frames_spec: list of (sequence_id, frame_index, has_gt, detection_conf or None)."""
    entries = []
    prediction_images = []
    for i, (sequence_id, frame_index, has_gt, conf) in enumerate(frames_spec):
        meta = repo.ingest_image(
            make_png(tag=start_tag + i),
            make_meta(sequence_id=sequence_id, frame_index=frame_index),
        )
        boxes = (BoundingBox(4, 4, 8, 8, "airplane"),) if has_gt else ()
        annotation_id = repo.commit_annotation(
            AnnotationRecord(
                image_digest=meta.image_digest,
                boxes=boxes,
                attributes={},
                author="t",
                created_at="2026-01-01T00:00:00Z",
            )
        )
        entries.append(DatasetEntry(meta.image_digest, annotation_id))
        detections = (
            (Detection(4, 4, 8, 8, "airplane", conf),) if conf is not None else ()
        )
        prediction_images.append((meta.image_digest.hex, detections))
    dataset_id = repo.create_dataset("seq-fixture", "certification", entries)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    predictions = PredictionSet(dataset=dataset_id, images=tuple(sorted(prediction_images)))
    return manifest, predictions


def test_build_timelines_all_detected(repo):
    manifest, predictions = build_sequence_fixture(
        repo, [("E1", i, True, 0.9) for i in range(5)]
    )
    timelines = build_timelines(repo, manifest, predictions)
    assert len(timelines) == 1
    assert [f.detected for f in timelines[0].frames] == [True] * 5


def test_build_timelines_without_sequence_metadata(repo):
    entries = []
    meta = repo.ingest_image(make_png(tag=900), make_meta())
    annotation_id = repo.commit_annotation(
        AnnotationRecord(
            image_digest=meta.image_digest,
            boxes=(),
            attributes={},
            author="t",
            created_at="2026-01-01T00:00:00Z",
        )
    )
    entries.append(DatasetEntry(meta.image_digest, annotation_id))
    dataset_id = repo.create_dataset("no-seq", "certification", entries)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    predictions = PredictionSet(dataset=dataset_id, images=())
    assert build_timelines(repo, manifest, predictions) == []


def test_build_timelines_interleaved_sequences(repo):
    spec = [
        ("A", 0, True, 0.9),
        ("B", 0, True, None),
        ("A", 1, True, None),
        ("B", 1, True, 0.9),
    ]
    manifest, predictions = build_sequence_fixture(repo, spec)
    timelines = build_timelines(repo, manifest, predictions)
    assert [t.sequence_id for t in timelines] == ["A", "B"]
    a, b = timelines
    assert [f.detected for f in a.frames] == [True, False]
    assert [f.detected for f in b.frames] == [False, True]


def test_build_timelines_duplicate_frame_index(repo):
    spec = [("A", 0, True, 0.9), ("A", 0, True, 0.9)]
    with pytest.raises(ValidationError, match="duplicate frame_index"):
        manifest, predictions = build_sequence_fixture(repo, spec)
        build_timelines(repo, manifest, predictions)


def test_build_timelines_respects_operating_confidence(repo):
    manifest, predictions = build_sequence_fixture(
        repo, [("E2", 0, True, 0.9), ("E2", 1, True, 0.2), ("E2", 2, True, 0.9)]
    )
    timelines = build_timelines(repo, manifest, predictions, operating_confidence=0.5)
    assert [f.detected for f in timelines[0].frames] == [True, False, True]
    row = flicker_analysis(timelines[0])
    assert row.flicker_events == 1


def test_build_timelines_splits_by_callsign(repo):
    entries = []
    prediction_images = []
    for i, (frame, callsign) in enumerate([(0, "N1"), (1, "N2"), (2, "N1"), (3, "N2")]):
        meta = repo.ingest_image(
            make_png(tag=950 + i), make_meta(sequence_id="MIX", frame_index=frame)
        )
        annotation_id = repo.commit_annotation(
            AnnotationRecord(
                image_digest=meta.image_digest,
                boxes=(BoundingBox(4, 4, 8, 8, "airplane"),),
                attributes={"callsign": callsign},
                author="t",
                created_at="2026-01-01T00:00:00Z",
            )
        )
        entries.append(DatasetEntry(meta.image_digest, annotation_id))
        prediction_images.append((meta.image_digest.hex, ()))
    dataset_id = repo.create_dataset("mix", "certification", entries)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    predictions = PredictionSet(dataset=dataset_id, images=tuple(sorted(prediction_images)))
    timelines = build_timelines(repo, manifest, predictions)
    assert [(t.sequence_id, t.track_key) for t in timelines] == [("MIX", "N1"), ("MIX", "N2")]
    assert [f.frame_index for f in timelines[0].frames] == [0, 2]
