import io

import numpy as np
import pytest
from PIL import Image

from certkit import ContentStore, ImageMeta, Repository


def make_png(width: int = 64, height: int = 48, tag: int = 0) -> bytes:
    """Tiny deterministic PNG; distinct tags give distinct bytes."""
    arr = np.full((height, width), 128, dtype=np.uint8)
    arr[0, 0] = tag % 256
    arr[0, 1] = (tag // 256) % 256
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def make_meta(flight: str = "F1", **overrides) -> ImageMeta:
    fields = dict(
        camera_id="cam-0",
        flight_id=flight,
        capture_time="2026-01-01T00:00:00Z",
    )
    fields.update(overrides)
    return ImageMeta(**fields)


@pytest.fixture
def store(tmp_path):
    return ContentStore(tmp_path / "store")


@pytest.fixture
def repo(store):
    return Repository(store)


@pytest.fixture
def ingest(repo):
    """Ingest a tagged fixture image; returns the completed metadata."""

    def _ingest(tag: int, flight: str = "F1", **overrides):
        return repo.ingest_image(make_png(tag=tag), make_meta(flight=flight, **overrides))

    return _ingest
