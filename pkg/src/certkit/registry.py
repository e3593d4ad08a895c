"""Model provenance manifests: everything needed to reproduce a trained
model byte for byte, plus tamper and leakage verification.

Training is never executed here. Manifests and environment traces are
declarative evidence ingested from the training environment; the registry's
job is to store them content-addressed, to refuse any manifest that trains
on certification-role data, and to compare manifests for reproducibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .canonical import canonical_dumps, fmt_decimal, parse_decimal
from .errors import FormatError, NotFoundError, ValidationError
from .store import Digest

TRACE_KINDS = ("code-repo", "library", "driver", "hardware")

# Manifest fields that must match for two training runs to count as the
# same inputs; with deterministic training, equal inputs imply equal output.
REPRODUCTION_INPUT_FIELDS = (
    "training_code_trace",
    "random_seeds",
    "initial_weights",
    "train_datasets",
    "hyperparameters",
)


@dataclass(frozen=True)
class TraceEntry:
    component: str
    kind: str
    version: str
    content_digest: Digest | None = None

    def __post_init__(self):
        if self.kind not in TRACE_KINDS:
            raise ValidationError(f"trace entry kind must be one of {TRACE_KINDS}")
        if not self.component:
            raise ValidationError("trace entry component must be non-empty")


@dataclass(frozen=True)
class EnvironmentTrace:
    """Versions of every code repo, library, driver, and hardware component
    in effect when a training job ran."""

    entries: tuple[TraceEntry, ...]

    def __post_init__(self):
        keys = [(e.component, e.kind) for e in self.entries]
        if len(set(keys)) != len(keys):
            dupes = sorted({k for k in keys if keys.count(k) > 1})
            raise ValidationError(f"duplicate trace entries: {dupes}")

    def to_canonical(self) -> dict:
        return {
            "entries": [
                {
                    "component": e.component,
                    "kind": e.kind,
                    "version": e.version,
                    "content_digest": e.content_digest.hex if e.content_digest else None,
                }
                for e in sorted(self.entries, key=lambda e: (e.component, e.kind))
            ]
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "EnvironmentTrace":
        entries = obj.get("entries")
        if not isinstance(entries, list):
            raise ValidationError("trace requires an 'entries' list")
        return cls(
            tuple(
                TraceEntry(
                    component=e["component"],
                    kind=e["kind"],
                    version=e["version"],
                    content_digest=Digest(e["content_digest"]) if e.get("content_digest") else None,
                )
                for e in entries
            )
        )

    @property
    def trace_id(self) -> Digest:
        return Digest.of_bytes(canonical_dumps(self.to_canonical()))


@dataclass(frozen=True)
class ModelManifest:
    model_file_digest: Digest
    training_code_trace: Digest
    random_seeds: tuple[tuple[str, int], ...]
    train_datasets: tuple[Digest, ...]
    eval_datasets: tuple[Digest, ...]
    hyperparameters: dict
    metrics: dict[str, str]  # decimal strings, kept exact for canonical hashing
    initial_weights_digest: Digest | None = None
    parent_model: Digest | None = None

    def __post_init__(self):
        if not self.train_datasets:
            raise ValidationError("train_datasets must be non-empty")
        for name, seed in self.random_seeds:
            if not isinstance(name, str) or isinstance(seed, bool) or not isinstance(seed, int):
                raise ValidationError(f"random seed entries are (name, integer): {(name, seed)!r}")
        for key, value in self.metrics.items():
            parse_decimal(value)  # must be numeric
            if not isinstance(value, str):
                raise ValidationError(f"metric {key!r} must be a decimal string")

    def to_canonical(self) -> dict:
        hyper = {}
        for key, value in sorted(self.hyperparameters.items()):
            if isinstance(value, float):
                hyper[key] = fmt_decimal(value)
            elif isinstance(value, (str, int, bool)) or value is None:
                hyper[key] = value
            else:
                raise ValidationError(f"hyperparameter {key!r} must be a JSON scalar")
        return {
            "model_file": self.model_file_digest.hex,
            "training_code_trace": self.training_code_trace.hex,
            "random_seeds": [[n, s] for n, s in sorted(self.random_seeds)],
            "initial_weights": (
                self.initial_weights_digest.hex if self.initial_weights_digest else None
            ),
            "train_datasets": sorted(d.hex for d in self.train_datasets),
            "eval_datasets": sorted(d.hex for d in self.eval_datasets),
            "hyperparameters": hyper,
            "metrics": dict(sorted(self.metrics.items())),
            "parent_model": self.parent_model.hex if self.parent_model else None,
        }

    @classmethod
    def from_canonical(cls, obj: dict) -> "ModelManifest":
        return cls(
            model_file_digest=Digest(obj["model_file"]),
            training_code_trace=Digest(obj["training_code_trace"]),
            random_seeds=tuple((n, s) for n, s in obj["random_seeds"]),
            train_datasets=tuple(Digest(d) for d in obj["train_datasets"]),
            eval_datasets=tuple(Digest(d) for d in obj["eval_datasets"]),
            hyperparameters=obj["hyperparameters"],
            metrics=obj["metrics"],
            initial_weights_digest=(
                Digest(obj["initial_weights"]) if obj.get("initial_weights") else None
            ),
            parent_model=Digest(obj["parent_model"]) if obj.get("parent_model") else None,
        )

    @property
    def manifest_id(self) -> Digest:
        return Digest.of_bytes(canonical_dumps(self.to_canonical()))


@dataclass(frozen=True)
class ReproductionReport:
    inputs_equal: bool
    outputs_equal: bool
    differing_fields: tuple[str, ...]

    @property
    def determinism_violation(self) -> bool:
        # Same inputs but different model bytes: the training pipeline is
        # not actually deterministic and cannot be reproduced byte for byte.
        return self.inputs_equal and not self.outputs_equal


class ModelRegistry:
    """Registration and verification of model provenance over a repository."""

    def __init__(self, repo):
        self.repo = repo
        self.store = repo.store

    def import_trace(self, path: str | Path) -> EnvironmentTrace:
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"trace file is not valid JSON: {exc.msg}") from None
        trace = EnvironmentTrace.from_obj(obj)
        self.store.put_json(trace.to_canonical(), "trace")
        return trace

    def commit_trace(self, trace: EnvironmentTrace) -> Digest:
        return self.store.put_json(trace.to_canonical(), "trace")

    def register_model(self, model_bytes: bytes, manifest: ModelManifest) -> ModelManifest:
        """Store model bytes + manifest after provenance checks.

        Rejects any manifest whose training inputs include a
        certification-role dataset: that is the core leakage guard.
        """
        model_digest = Digest.of_bytes(model_bytes)
        if manifest.model_file_digest != model_digest:
            raise ValidationError(
                f"manifest model_file digest {manifest.model_file_digest.hex} does not match "
                f"the provided bytes ({model_digest.hex})"
            )
        if not self.store.exists(manifest.training_code_trace):
            raise NotFoundError(f"unknown trace: {manifest.training_code_trace.hex}")
        if manifest.initial_weights_digest and not self.store.exists(
            manifest.initial_weights_digest
        ):
            raise NotFoundError(
                f"unknown initial weights: {manifest.initial_weights_digest.hex}"
            )
        if manifest.parent_model and not self.store.exists(manifest.parent_model):
            raise NotFoundError(f"unknown parent model: {manifest.parent_model.hex}")
        for ds in manifest.train_datasets:
            role = self.repo.checkout_dataset(ds, verify=False).role
            if role == "certification":
                raise ValidationError(
                    f"certification data used in training: dataset {ds.hex}"
                )
        for ds in manifest.eval_datasets:
            self.repo.checkout_dataset(ds, verify=False)

        self.store.put(model_bytes, "model-file")
        self.store.put_json(manifest.to_canonical(), "model-manifest")
        return manifest

    def get_manifest(self, manifest_id: Digest) -> ModelManifest:
        try:
            return ModelManifest.from_canonical(self.store.get_json(manifest_id))
        except NotFoundError:
            raise NotFoundError(f"unknown model manifest: {manifest_id.hex}") from None

    def verify_model_file(self, manifest_id: Digest, candidate_bytes: bytes) -> bool:
        manifest = self.get_manifest(manifest_id)
        return Digest.of_bytes(candidate_bytes) == manifest.model_file_digest

    def verify_reproduction(self, a: Digest, b: Digest) -> ReproductionReport:
        ma = self.get_manifest(a).to_canonical()
        mb = self.get_manifest(b).to_canonical()
        differing = [
            field for field in REPRODUCTION_INPUT_FIELDS if ma[field] != mb[field]
        ]
        inputs_equal = not differing
        outputs_equal = ma["model_file"] == mb["model_file"]
        if not outputs_equal:
            differing.append("model_file_digest")
        return ReproductionReport(inputs_equal, outputs_equal, tuple(differing))

    def audit(self) -> list[tuple[str, str]]:
        """Scan every stored manifest for certification data in training.

        Returns (manifest digest, offending dataset digest) pairs; empty
        means the store is clean.
        """
        violations: list[tuple[str, str]] = []
        for obj in self.store.objects(kind="model-manifest"):
            manifest = self.get_manifest(obj.digest)
            for ds in manifest.train_datasets:
                if self.repo.checkout_dataset(ds, verify=False).role == "certification":
                    violations.append((obj.digest.hex, ds.hex))
        return sorted(set(violations))

    def list_manifests(self) -> list[Digest]:
        return [obj.digest for obj in self.store.objects(kind="model-manifest")]
