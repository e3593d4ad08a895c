"""Append-only content-addressed object store.

Objects are identified by the SHA-256 of their bytes and laid out as
``objects/<first 2 hex chars>/<remaining 62 chars>`` under the store root.
Writes go through an exclusive file lock and land via write-to-temp +
rename, so a put either fully happens or leaves no trace. Objects are
never mutated or deleted; re-storing identical bytes is a no-op.

Beside the object tree the store keeps:

  * ``index.jsonl`` — one append-only line per first-time put recording
    kind and byte length (used for listing, e.g. the model audit);
  * ``refs/<namespace>/<name>`` — small mutable pointer files (dataset
    name tips, image-digest -> metadata links). Refs are conveniences,
    not objects: history integrity never depends on them.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IntegrityError, NotFoundError, ValidationError

HASH_ALGORITHM = "sha256"
_HEX_RE = re.compile(r"^[0-9a-f]{64}$")
_REF_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")

OBJECT_KINDS = frozenset(
    {
        "image",
        "annotation",
        "dataset-manifest",
        "model-file",
        "model-manifest",
        "trace",
        "prediction-set",
        # Kinds beyond the core set, needed so that domain/requirement specs,
        # image metadata, and evaluation reports are content-addressed too.
        "image-meta",
        "domain-spec",
        "requirement-spec",
        "evaluation-report",
    }
)


@dataclass(frozen=True, order=True)
class Digest:
    """Content hash identifying a stored object."""

    hex: str
    algorithm: str = field(default=HASH_ALGORITHM, compare=False)

    def __post_init__(self):
        if self.algorithm != HASH_ALGORITHM:
            raise ValidationError(f"unsupported digest algorithm: {self.algorithm!r}")
        if not isinstance(self.hex, str) or not _HEX_RE.match(self.hex):
            raise ValidationError(f"digest must be 64 lowercase hex chars, got {self.hex!r}")

    @classmethod
    def of_bytes(cls, data: bytes) -> "Digest":
        return cls(hashlib.sha256(data).hexdigest())

    def __str__(self) -> str:
        return self.hex


@dataclass(frozen=True)
class StoredObject:
    digest: Digest
    kind: str
    byte_length: int


class ContentStore:
    """File-backed content-addressed store rooted at ``root``."""

    def __init__(self, root: str | Path, create: bool = True):
        self.root = Path(root)
        self._objects = self.root / "objects"
        self._tmp = self.root / "tmp"
        self._refs = self.root / "refs"
        self._index = self.root / "index.jsonl"
        self._lockfile = self.root / "lock"
        self._thread_lock = threading.RLock()
        if create:
            for d in (self._objects, self._tmp, self._refs):
                d.mkdir(parents=True, exist_ok=True)
            self._lockfile.touch(exist_ok=True)
        elif not self._objects.is_dir():
            raise NotFoundError(f"no object store at {self.root}")

    # -- locking ---------------------------------------------------------

    @contextmanager
    def _write_lock(self):
        # Serializes writers across threads and processes; readers stay lock-free.
        with self._thread_lock:
            with open(self._lockfile, "a+b") as fh:
                fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
                try:
                    yield
                finally:
                    fcntl.flock(fh.fileno(), fcntl.LOCK_UN)

    # -- object paths ----------------------------------------------------

    def _object_path(self, digest: Digest) -> Path:
        return self._objects / digest.hex[:2] / digest.hex[2:]

    # -- core operations --------------------------------------------------

    def put(self, data: bytes, kind: str) -> Digest:
        """Store ``data`` and return its digest. Idempotent for identical bytes."""
        if kind not in OBJECT_KINDS:
            raise ValidationError(f"unknown object kind: {kind!r}")
        if not isinstance(data, (bytes, bytearray, memoryview)):
            raise ValidationError("put() takes raw bytes")
        data = bytes(data)
        digest = Digest.of_bytes(data)
        path = self._object_path(digest)
        if path.exists():
            return digest
        with self._write_lock():
            if path.exists():
                return digest
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self._tmp / f"{digest.hex}.partial-{os.getpid()}"
            tmp.write_bytes(data)
            os.replace(tmp, path)
            with open(self._index, "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {"digest": digest.hex, "kind": kind, "byte_length": len(data)},
                        sort_keys=True,
                    )
                    + "\n"
                )
        return digest

    def get(self, digest: Digest) -> bytes:
        """Return the stored bytes, verifying them against the digest."""
        path = self._object_path(digest)
        if not path.exists():
            raise NotFoundError(f"object not found: {digest.hex}")
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != digest.hex:
            raise IntegrityError(digest.hex)
        return data

    def exists(self, digest: Digest) -> bool:
        return self._object_path(digest).exists()

    def objects(self, kind: str | None = None) -> list[StoredObject]:
        """List stored objects from the index, optionally filtered by kind."""
        out: list[StoredObject] = []
        if not self._index.exists():
            return out
        with open(self._index, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if kind is not None and rec["kind"] != kind:
                    continue
                out.append(StoredObject(Digest(rec["digest"]), rec["kind"], rec["byte_length"]))
        return out

    def verify(self) -> list[Digest]:
        """Re-hash every stored object; return the digests that no longer match."""
        violations: list[Digest] = []
        if not self._objects.is_dir():
            return violations
        for shard in sorted(self._objects.iterdir()):
            if not shard.is_dir():
                continue
            for obj in sorted(shard.iterdir()):
                recorded = shard.name + obj.name
                if not _HEX_RE.match(recorded):
                    continue
                actual = hashlib.sha256(obj.read_bytes()).hexdigest()
                if actual != recorded:
                    violations.append(Digest(recorded))
        return violations

    # -- canonical JSON objects -------------------------------------------

    def put_json(self, obj, kind: str) -> Digest:
        from .canonical import canonical_dumps

        return self.put(canonical_dumps(obj), kind)

    def get_json(self, digest: Digest):
        from .canonical import canonical_loads

        return canonical_loads(self.get(digest))

    # -- refs --------------------------------------------------------------

    def _ref_path(self, namespace: str, name: str) -> Path:
        if not _REF_NAME_RE.match(namespace) or not _REF_NAME_RE.match(name):
            raise ValidationError(f"invalid ref name: {namespace}/{name}")
        return self._refs / namespace / name

    def set_ref(self, namespace: str, name: str, digest: Digest) -> None:
        path = self._ref_path(namespace, name)
        with self._write_lock():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self._tmp / f"ref-{os.getpid()}-{threading.get_ident()}"
            tmp.write_text(digest.hex + "\n", encoding="utf-8")
            os.replace(tmp, path)

    def get_ref(self, namespace: str, name: str) -> Digest:
        path = self._ref_path(namespace, name)
        if not path.exists():
            raise NotFoundError(f"unknown ref: {namespace}/{name}")
        return Digest(path.read_text(encoding="utf-8").strip())

    def has_ref(self, namespace: str, name: str) -> bool:
        return self._ref_path(namespace, name).exists()

    def list_refs(self, namespace: str) -> dict[str, Digest]:
        base = self._refs / namespace
        if not base.is_dir():
            return {}
        return {
            p.name: Digest(p.read_text(encoding="utf-8").strip())
            for p in sorted(base.iterdir())
            if p.is_file()
        }
