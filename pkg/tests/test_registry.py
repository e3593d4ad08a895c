import json

import pytest

from certkit import (
    DatasetEntry,
    Digest,
    EnvironmentTrace,
    ModelManifest,
    ModelRegistry,
    NotFoundError,
    TraceEntry,
    ValidationError,
)
from certkit.datasets import AnnotationRecord, BoundingBox

from conftest import make_png, make_meta


@pytest.fixture
def registry(repo):
    return ModelRegistry(repo)


def _dataset(repo, name, role, tag):
    meta = repo.ingest_image(make_png(tag=tag), make_meta())
    annotation_id = repo.commit_annotation(
        AnnotationRecord(
            image_digest=meta.image_digest,
            boxes=(BoundingBox(1, 1, 4, 4, "airplane"),),
            attributes={},
            author="t",
            created_at="2026-01-01T00:00:00Z",
        )
    )
    return repo.create_dataset(name, role, [DatasetEntry(meta.image_digest, annotation_id)])


@pytest.fixture
def trace(registry):
    t = EnvironmentTrace(
        (
            TraceEntry("train-repo", "code-repo", "a1b2c3"),
            TraceEntry("tensor-lib", "library", "2.14.0"),
            TraceEntry("gpu-driver", "driver", "535.86"),
            TraceEntry("gpu", "hardware", "A100"),
            TraceEntry("data-repo", "code-repo", "f00d"),
        )
    )
    registry.commit_trace(t)
    return t


def manifest_for(trace, model_bytes, train, seeds=(("global", 42),), hyper=None):
    return ModelManifest(
        model_file_digest=Digest.of_bytes(model_bytes),
        training_code_trace=trace.trace_id,
        random_seeds=tuple(seeds),
        train_datasets=tuple(train),
        eval_datasets=(),
        hyperparameters=hyper or {"lr": "0.001", "epochs": 50},
        metrics={"ap": "0.79"},
    )


def test_trace_entry_count(trace):
    assert len(trace.entries) == 5


def test_trace_duplicate_component_kind_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        EnvironmentTrace(
            (
                TraceEntry("tensor-lib", "library", "2.14.0"),
                TraceEntry("tensor-lib", "library", "2.15.0"),
            )
        )


def test_trace_empty_is_valid(registry):
    trace = EnvironmentTrace(())
    assert registry.commit_trace(trace) == trace.trace_id


def test_import_trace_file(registry, tmp_path):
    doc = {
        "entries": [
            {"component": "train-repo", "kind": "code-repo", "version": "abc"},
            {"component": "tensor-lib", "kind": "library", "version": "2.14"},
        ]
    }
    path = tmp_path / "trace.json"
    path.write_text(json.dumps(doc))
    trace = registry.import_trace(path)
    assert len(trace.entries) == 2
    assert registry.store.exists(trace.trace_id)


def test_register_rejects_certification_training_data(repo, registry, trace):
    cert = _dataset(repo, "certset", "certification", tag=1)
    manifest = manifest_for(trace, b"weights", [cert])
    with pytest.raises(ValidationError, match="certification data used in training"):
        registry.register_model(b"weights", manifest)


def test_register_content_addressed(repo, registry, trace):
    train = _dataset(repo, "trainset", "development-train", tag=2)
    manifest = manifest_for(trace, b"weights-v1", [train])
    a = registry.register_model(b"weights-v1", manifest)
    b = registry.register_model(b"weights-v1", manifest)
    assert a.manifest_id == b.manifest_id
    assert len(registry.list_manifests()) == 1


def test_register_distinct_bytes_distinct_manifests(repo, registry, trace):
    train = _dataset(repo, "trainset2", "development-train", tag=3)
    m1 = registry.register_model(b"bytes-a", manifest_for(trace, b"bytes-a", [train]))
    m2 = registry.register_model(b"bytes-b", manifest_for(trace, b"bytes-b", [train]))
    assert m1.manifest_id != m2.manifest_id
    assert m1.model_file_digest != m2.model_file_digest


def test_register_requires_known_trace(repo, registry):
    train = _dataset(repo, "trainset3", "development-train", tag=4)
    ghost = EnvironmentTrace((TraceEntry("x", "library", "1"),))
    manifest = manifest_for(ghost, b"w", [train])
    with pytest.raises(NotFoundError, match="trace"):
        registry.register_model(b"w", manifest)


def test_train_datasets_must_be_nonempty(trace):
    with pytest.raises(ValidationError, match="non-empty"):
        manifest_for(trace, b"w", [])


def test_verify_model_file(repo, registry, trace):
    train = _dataset(repo, "trainset4", "development-train", tag=5)
    model_bytes = b"\x01\x02\x03\x04 weights"
    manifest = registry.register_model(model_bytes, manifest_for(trace, model_bytes, [train]))
    assert registry.verify_model_file(manifest.manifest_id, model_bytes)
    flipped = bytearray(model_bytes)
    flipped[3] ^= 0x10
    assert not registry.verify_model_file(manifest.manifest_id, bytes(flipped))
    assert not registry.verify_model_file(manifest.manifest_id, b"")


def test_reproduction_reflexive(repo, registry, trace):
    train = _dataset(repo, "trainset5", "development-train", tag=6)
    m = registry.register_model(b"w5", manifest_for(trace, b"w5", [train]))
    report = registry.verify_reproduction(m.manifest_id, m.manifest_id)
    assert report.inputs_equal and report.outputs_equal
    assert not report.determinism_violation
    assert report.differing_fields == ()


def test_reproduction_determinism_violation(repo, registry, trace):
    train = _dataset(repo, "trainset6", "development-train", tag=7)
    a = registry.register_model(b"run-one", manifest_for(trace, b"run-one", [train]))
    b = registry.register_model(b"run-two", manifest_for(trace, b"run-two", [train]))
    report = registry.verify_reproduction(a.manifest_id, b.manifest_id)
    assert report.inputs_equal
    assert not report.outputs_equal
    assert report.determinism_violation
    assert report.differing_fields == ("model_file_digest",)


def test_reproduction_different_seed(repo, registry, trace):
    train = _dataset(repo, "trainset7", "development-train", tag=8)
    a = registry.register_model(
        b"w-a", manifest_for(trace, b"w-a", [train], seeds=(("global", 42),))
    )
    b = registry.register_model(
        b"w-b", manifest_for(trace, b"w-b", [train], seeds=(("global", 43),))
    )
    report = registry.verify_reproduction(a.manifest_id, b.manifest_id)
    assert not report.inputs_equal
    assert "random_seeds" in report.differing_fields
    assert not report.determinism_violation


def test_reproduction_symmetric(repo, registry, trace):
    train = _dataset(repo, "trainset8", "development-train", tag=9)
    a = registry.register_model(
        b"w-s1", manifest_for(trace, b"w-s1", [train], hyper={"lr": "0.001"})
    )
    b = registry.register_model(
        b"w-s2", manifest_for(trace, b"w-s2", [train], hyper={"lr": "0.01"})
    )
    ab = registry.verify_reproduction(a.manifest_id, b.manifest_id)
    ba = registry.verify_reproduction(b.manifest_id, a.manifest_id)
    assert (ab.inputs_equal, ab.outputs_equal) == (ba.inputs_equal, ba.outputs_equal)


def test_audit_flags_planted_violation(repo, registry, trace):
    train = _dataset(repo, "t-audit", "development-train", tag=10)
    cert = _dataset(repo, "c-audit", "certification", tag=11)
    registry.register_model(b"clean-1", manifest_for(trace, b"clean-1", [train]))
    registry.register_model(b"clean-2", manifest_for(trace, b"clean-2", [train]))
    assert registry.audit() == []
    # plant a violating manifest via a raw store write, bypassing registration
    planted = manifest_for(trace, b"dirty", [cert])
    repo.store.put(b"dirty", "model-file")
    planted_id = repo.store.put_json(planted.to_canonical(), "model-manifest")
    violations = registry.audit()
    assert violations == [(planted_id.hex, cert.hex)]
    assert len(registry.list_manifests()) == 3


def test_metrics_must_be_decimal_strings(trace):
    with pytest.raises(ValidationError):
        ModelManifest(
            model_file_digest=Digest.of_bytes(b"w"),
            training_code_trace=trace.trace_id,
            random_seeds=(),
            train_datasets=(Digest("ab" * 32),),
            eval_datasets=(),
            hyperparameters={},
            metrics={"ap": "not-numeric"},
        )
