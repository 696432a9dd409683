"""JSON-lines manifests: one header object, then one record per item.

Input header:  {"kind": "decoupled-mixup-manifest", "version": 1, "classes": K}
Input record:  {"image": "path.png", "label": 2}            (class index)
               {"image": "path.png", "label": [0.25, 0.75]} (explicit vector)
               optional "mask": "mask.png"
Relative paths resolve against the manifest's directory. Class indices are
turned into one-hot vectors at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ManifestError, MixupError
from .tensors import as_label, one_hot

MANIFEST_KIND = "decoupled-mixup-manifest"
OUTPUT_KIND = "decoupled-mixup-output"
MANIFEST_VERSION = 1


@dataclass
class ManifestEntry:
    image_path: Path
    label: np.ndarray  # (K,) soft label
    mask_path: Path | None = None


def _parse_header(line: str) -> int:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"line 1: header is not valid JSON: {exc}") from None
    if not isinstance(header, dict):
        raise ManifestError("line 1: header must be a JSON object")
    kind = header.get("kind", MANIFEST_KIND)
    if kind != MANIFEST_KIND:
        raise ManifestError(f"line 1: unexpected manifest kind {kind!r}")
    classes = header.get("classes")
    if not isinstance(classes, int) or classes < 1:
        raise ManifestError("line 1: header must declare a positive integer 'classes'")
    return classes


def _parse_entry(record: dict, classes: int, base: Path, lineno: int) -> ManifestEntry:
    image = record.get("image")
    if not isinstance(image, str) or not image:
        raise ManifestError(f"line {lineno}: record must name an 'image' path")
    image_path = (base / image).resolve() if not Path(image).is_absolute() else Path(image)
    if not image_path.is_file():
        raise FileNotFoundError(f"line {lineno}: image not found: {image_path}")

    raw_label = record.get("label")
    if isinstance(raw_label, bool) or raw_label is None:
        raise ManifestError(f"line {lineno}: record must carry a 'label'")
    if isinstance(raw_label, int):
        if not 0 <= raw_label < classes:
            raise ManifestError(
                f"line {lineno}: label index {raw_label} out of range for "
                f"{classes} classes"
            )
        label = one_hot(raw_label, classes)
    elif isinstance(raw_label, list):
        try:
            label = as_label(raw_label, classes)
        except MixupError as exc:
            raise ManifestError(f"line {lineno}: bad label vector: {exc}") from None
    else:
        raise ManifestError(f"line {lineno}: label must be an index or a vector")

    mask = record.get("mask")
    mask_path: Path | None = None
    if mask is not None:
        if not isinstance(mask, str) or not mask:
            raise ManifestError(f"line {lineno}: 'mask' must be a path string")
        mask_path = (base / mask).resolve() if not Path(mask).is_absolute() else Path(mask)
    return ManifestEntry(image_path=image_path, label=label, mask_path=mask_path)


def load_manifest(path: str | Path) -> tuple[list[ManifestEntry], int]:
    """Parse a manifest file; returns (entries, class count)."""
    path = Path(path)
    base = path.parent
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ManifestError("manifest is empty, expected a header line")
    classes = _parse_header(lines[0])

    entries: list[ManifestEntry] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"line {lineno}: not valid JSON: {exc}") from None
        if not isinstance(record, dict):
            raise ManifestError(f"line {lineno}: record must be a JSON object")
        entries.append(_parse_entry(record, classes, base, lineno))
    return entries, classes


def dump_jsonl(header: dict, records: list[dict]) -> str:
    """Stable serialization: sorted keys, one object per line."""
    out = [json.dumps(header, sort_keys=True)]
    out.extend(json.dumps(record, sort_keys=True) for record in records)
    return "\n".join(out) + "\n"
