import numpy as np
import pytest

from decoupled_mixup.image_io import write_image
from decoupled_mixup.manifest import dump_jsonl

MANIFEST_HEADER = {"kind": "decoupled-mixup-manifest", "version": 1}


def random_image(rng, height=16, width=16, channels=3):
    return rng.uniform(size=(height, width, channels))


def random_simplex(rng, k):
    return rng.dirichlet(np.ones(k))


def soft_blob_mask(size, center, radius):
    """Radial soft foreground blob, values in [0, 1]."""
    rows, cols = np.mgrid[0:size, 0:size]
    dist = np.hypot(rows - center[0], cols - center[1])
    return np.clip(1.0 - dist / radius, 0.0, 1.0)


def write_dataset(root, n=6, size=16, classes=3, channels=3, masks=False, seed=7):
    """Write images (+ optional masks) and a manifest; returns the manifest path."""
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        name = f"in_{i}.png"
        write_image(root / name, rng.uniform(size=(size, size, channels)))
        record = {"image": name, "label": i % classes}
        if masks:
            mask = soft_blob_mask(size, center=(size // 2, (i * 3) % size), radius=size / 2)
            write_image(root / f"mask_{i}.png", mask[:, :, None])
            record["mask"] = f"mask_{i}.png"
        records.append(record)
    manifest = root / "manifest.jsonl"
    manifest.write_text(dump_jsonl({**MANIFEST_HEADER, "classes": classes}, records))
    return manifest


@pytest.fixture
def make_dataset(tmp_path):
    def _make(subdir="data", **kwargs):
        return write_dataset(tmp_path / subdir, **kwargs)

    return _make
