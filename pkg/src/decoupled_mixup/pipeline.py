"""Batch execution: pairing, parameter draws, mode dispatch, file output,
run reporting and parameter-sweep grid rendering.

Per-run randomness is laid out over counter-based streams so that results do
not depend on execution order: stream (seed, 0) draws the pairing permutation
and stream (seed, 1 + i) drives item i. Items are independent work units; the
output manifest is always written in input order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .context import cd_mixup
from .errors import ParameterError
from .freq import PHASE_SOURCES, fd_mixup
from .image_io import FORMATS, output_extension, read_image, read_mask, write_image
from .manifest import OUTPUT_KIND, MANIFEST_VERSION, ManifestEntry, dump_jsonl
from .mix import (
    MixParams,
    apply_cut_box,
    convex_mix,
    cut_area_ratio,
    cutmix,
    mix_labels,
    sample_cut_box,
    sample_lambda,
)
from .rng import RngStream
from .style import style_mixup
from .tensors import check_unit_interval, one_hot

MODES = ("mixup", "cutmix", "fd", "cd", "style")

# Stream layout within a run.
PAIRING_STREAM = 0
ITEM_STREAM_BASE = 1

DEFAULT_ALPHA = 0.2
CD_DEFAULT_ALPHA = 1.0  # context mode mixes the background randomly by default

MANIFEST_NAME = "manifest.jsonl"
REPORT_NAME = "report.json"
GRID_NAME = "grid.png"

GRID_SEPARATOR = 2
GRID_SEPARATOR_VALUE = 0.5


@dataclass
class RunConfig:
    """Everything a batch run depends on besides the manifest itself."""

    mode: str
    output_dir: Path
    seed: int = 0
    beta_shape: float = 1.0
    alpha: float | None = None  # None = mode default (0.2; 1.0 for cd)
    fixed_lambda_v: float | None = None
    fixed_lambda_delta: float | None = None
    phase_source: str = "first"
    image_format: str = "png"
    jobs: int = 1
    grid_spec: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.phase_source not in PHASE_SOURCES:
            raise ParameterError(f"phase_source must be one of {PHASE_SOURCES}")
        if self.image_format not in FORMATS:
            raise ParameterError(f"image_format must be one of {FORMATS}")
        if not self.beta_shape > 0:
            raise ParameterError(f"beta_shape must be > 0, got {self.beta_shape}")
        for name in ("alpha", "fixed_lambda_v", "fixed_lambda_delta"):
            value = getattr(self, name)
            if value is not None:
                check_unit_interval(name, value)
        if self.jobs < 1:
            raise ParameterError(f"jobs must be >= 1, got {self.jobs}")
        self.output_dir = Path(self.output_dir)
        if self.grid_spec is not None:
            lambdas, alphas = self.grid_spec
            if not lambdas or not alphas:
                raise ParameterError("grid_spec lists must be non-empty")

    @property
    def resolved_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return CD_DEFAULT_ALPHA if self.mode == "cd" else DEFAULT_ALPHA


@dataclass
class MixOutcome:
    """One mixed pair plus the parameters that were actually applied."""

    image: np.ndarray
    label: np.ndarray
    lambda_v: float
    lambda_delta: float | None = None
    alpha: float | None = None
    style_t: float | None = None
    box: tuple[int, int, int, int] | None = None
    warnings: list[str] = field(default_factory=list)


def pair_items(n: int, rng: RngStream) -> np.ndarray:
    """Seeded permutation pairing item i with partner perm[i]."""
    if n < 1:
        raise ParameterError(f"cannot pair {n} items")
    return rng.permutation(n)


def mix_pair(
    mode: str,
    x_i: np.ndarray,
    x_j: np.ndarray,
    y_i: np.ndarray,
    y_j: np.ndarray,
    stream: RngStream,
    *,
    m_i: np.ndarray | None = None,
    m_j: np.ndarray | None = None,
    beta_shape: float = 1.0,
    alpha: float | None = None,
    lambda_v: float | None = None,
    lambda_delta: float | None = None,
    style_t: float | None = None,
    phase_source: str = "first",
) -> MixOutcome:
    """Dispatch one pair through a mixing mode.

    Draw order per item: lambda_v (Beta), lambda_delta (Uniform, only for
    modes that use it), the CutMix box corner, then the style weight t. Fixed
    values skip their draw.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    warnings: list[str] = []

    lam_v = lambda_v if lambda_v is not None else sample_lambda(stream, beta_shape)

    if mode == "mixup":
        image = convex_mix(x_i, x_j, lam_v)
        return MixOutcome(image, mix_labels(y_i, y_j, lam_v), lam_v, warnings=warnings)

    if mode == "cutmix":
        height, width = x_i.shape[:2]
        box = sample_cut_box(stream, height, width, lam_v)
        image = apply_cut_box(x_i, x_j, box)
        lam_actual = 1.0 - cut_area_ratio(box, height, width)
        label = mix_labels(y_i, y_j, lam_actual)
        return MixOutcome(image, label, lam_actual, box=box, warnings=warnings)

    lam_d = lambda_delta if lambda_delta is not None else float(stream.uniform())
    alpha_value = alpha if alpha is not None else (
        CD_DEFAULT_ALPHA if mode == "cd" else DEFAULT_ALPHA
    )

    if mode == "fd":
        params = MixParams(lam_v, lam_d, alpha_value, beta_shape)
        image, label = fd_mixup(x_i, x_j, y_i, y_j, params, phase_source)
        return MixOutcome(image, label, lam_v, lam_d, alpha_value, warnings=warnings)

    if mode == "cd":
        if m_i is None:
            warnings.append("first operand has no mask; using all-ones foreground")
            m_i = np.ones(x_i.shape[:2])
        if m_j is None:
            warnings.append("second operand has no mask; using all-ones foreground")
            m_j = np.ones(x_j.shape[:2])
        params = MixParams(lam_v, lam_d, alpha_value, beta_shape)
        image, label = cd_mixup(x_i, m_i, x_j, m_j, y_i, y_j, params)
        return MixOutcome(image, label, lam_v, lam_d, alpha_value, warnings=warnings)

    # style
    t = style_t if style_t is not None else float(stream.uniform(0.0, lam_v))
    params = MixParams(lam_v, lam_d, alpha_value, beta_shape, style_t=t)
    image, label = style_mixup(x_i, x_j, y_i, y_j, params)
    return MixOutcome(image, label, lam_v, lam_d, alpha_value, style_t=t, warnings=warnings)


@dataclass
class RunReport:
    total: int
    ok: int
    failed: int
    failures: list[dict]
    warnings: list[str]
    output_dir: Path
    manifest_path: Path
    report_path: Path

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "ok": self.ok,
            "failed": self.failed,
            "failures": self.failures,
            "warnings": self.warnings,
        }


def _null_record(index: int, partner: int) -> dict:
    return {
        "index": index,
        "pair": [index, partner],
        "status": None,
        "image": None,
        "label": None,
        "lambda_v": None,
        "lambda_delta": None,
        "alpha": None,
        "style_t": None,
        "box": None,
        "error": None,
    }


def _process_item(
    index: int,
    entries: list[ManifestEntry],
    perm: np.ndarray,
    config: RunConfig,
) -> tuple[dict, list[str]]:
    partner = int(perm[index])
    record = _null_record(index, partner)
    entry, other = entries[index], entries[partner]
    warnings: list[str] = []
    try:
        x_i = read_image(entry.image_path)
        x_j = read_image(other.image_path)
        m_i = m_j = None
        if config.mode == "cd":
            if entry.mask_path is not None:
                m_i = read_mask(entry.mask_path)
            if other.mask_path is not None:
                m_j = read_mask(other.mask_path)
        stream = RngStream(config.seed, ITEM_STREAM_BASE + index)
        outcome = mix_pair(
            config.mode,
            x_i,
            x_j,
            entry.label,
            other.label,
            stream,
            m_i=m_i,
            m_j=m_j,
            beta_shape=config.beta_shape,
            alpha=config.alpha,
            lambda_v=config.fixed_lambda_v,
            lambda_delta=config.fixed_lambda_delta,
            phase_source=config.phase_source,
        )
        name = f"{index:06d}" + output_extension(
            config.image_format, outcome.image.shape[2]
        )
        write_image(config.output_dir / name, outcome.image, config.image_format)
        record.update(
            status="ok",
            image=name,
            label=[float(v) for v in outcome.label],
            lambda_v=outcome.lambda_v,
            lambda_delta=outcome.lambda_delta,
            alpha=outcome.alpha,
            style_t=outcome.style_t,
            box=list(outcome.box) if outcome.box is not None else None,
        )
        warnings.extend(f"item {index}: {note}" for note in outcome.warnings)
    except Exception as exc:  # skip-and-report: one bad item must not kill the batch
        record.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return record, warnings


def run_batch(
    config: RunConfig, entries: list[ManifestEntry], classes: int
) -> RunReport:
    """Mix every manifest item with its paired partner and write the results.

    Emits one image file and one manifest record per input item, plus a run
    report. The whole run is a pure function of (config, entries); per-item
    failures are recorded and do not abort the batch.
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    n = len(entries)
    records: list[dict] = []
    all_warnings: list[str] = []

    if n > 0:
        perm = pair_items(n, RngStream(config.seed, PAIRING_STREAM))

        def worker(i: int):
            return _process_item(i, entries, perm, config)

        if config.jobs > 1:
            with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                results = list(pool.map(worker, range(n)))
        else:
            results = [worker(i) for i in range(n)]
        for record, warnings in results:
            records.append(record)
            all_warnings.extend(warnings)

    header = {
        "kind": OUTPUT_KIND,
        "version": MANIFEST_VERSION,
        "classes": classes,
        "mode": config.mode,
        "seed": config.seed,
        "beta_shape": config.beta_shape,
        "alpha": config.resolved_alpha,
        "fixed_lambda_v": config.fixed_lambda_v,
        "fixed_lambda_delta": config.fixed_lambda_delta,
        "phase_source": config.phase_source,
        "image_format": config.image_format,
    }
    manifest_path = config.output_dir / MANIFEST_NAME
    manifest_path.write_text(dump_jsonl(header, records), encoding="utf-8")

    failures = [
        {"index": r["index"], "error": r["error"]}
        for r in records
        if r["status"] == "error"
    ]
    report = RunReport(
        total=n,
        ok=n - len(failures),
        failed=len(failures),
        failures=failures,
        warnings=all_warnings,
        output_dir=config.output_dir,
        manifest_path=manifest_path,
        report_path=config.output_dir / REPORT_NAME,
    )
    report.report_path.write_text(
        json.dumps(
            {"mode": config.mode, "seed": config.seed, **report.to_dict()},
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return report


def _grid_tile(
    mode: str,
    x_i: np.ndarray,
    x_j: np.ndarray,
    lam: float,
    alpha: float,
    cell_stream: RngStream,
    m_i: np.ndarray | None,
    m_j: np.ndarray | None,
    phase_source: str,
    lambda_delta: float,
) -> np.ndarray:
    y_i, y_j = one_hot(0, 2), one_hot(1, 2)  # labels are discarded for tiles
    if mode == "mixup":
        return convex_mix(x_i, x_j, lam)
    if mode == "cutmix":
        return cutmix(x_i, x_j, y_i, y_j, lam, cell_stream)[0]
    if mode == "fd":
        params = MixParams(lam, lambda_delta, alpha)
        return fd_mixup(x_i, x_j, y_i, y_j, params, phase_source)[0]
    if mode == "cd":
        ones = np.ones(x_i.shape[:2])
        params = MixParams(lam, lambda_delta, alpha)
        return cd_mixup(
            x_i, m_i if m_i is not None else ones,
            x_j, m_j if m_j is not None else ones,
            y_i, y_j, params,
        )[0]
    # style: sweep content and style jointly by tying t to the mixing ratio
    params = MixParams(lam, lambda_delta, alpha, style_t=lam)
    return style_mixup(x_i, x_j, y_i, y_j, params)[0]


def render_grid(
    x_i,
    x_j,
    lambda_list,
    alpha_list,
    mode: str,
    *,
    m_i: np.ndarray | None = None,
    m_j: np.ndarray | None = None,
    phase_source: str = "first",
    lambda_delta: float = 1.0,
    seed: int = 0,
) -> np.ndarray:
    """Tile a parameter sweep: rows vary the mixing ratio, columns vary alpha.

    Tiles are separated (and framed) by 2-pixel mid-gray borders, so a
    R x C grid of h x w tiles measures (R*h + (R+1)*2) x (C*w + (C+1)*2).
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    lambdas = [check_unit_interval("lambda", v) for v in lambda_list]
    alphas = [check_unit_interval("alpha", v) for v in alpha_list]
    if not lambdas or not alphas:
        raise ParameterError("grid needs at least one lambda and one alpha")
    x_i = np.asarray(x_i, dtype=np.float64)
    x_j = np.asarray(x_j, dtype=np.float64)

    height, width, channels = x_i.shape
    sep = GRID_SEPARATOR
    rows, cols = len(lambdas), len(alphas)
    canvas = np.full(
        (rows * height + (rows + 1) * sep, cols * width + (cols + 1) * sep, channels),
        GRID_SEPARATOR_VALUE,
    )
    for r, lam in enumerate(lambdas):
        for c, alpha in enumerate(alphas):
            cell_stream = RngStream(seed, r * cols + c)
            tile = _grid_tile(
                mode, x_i, x_j, lam, alpha, cell_stream, m_i, m_j,
                phase_source, lambda_delta,
            )
            top = sep + r * (height + sep)
            left = sep + c * (width + sep)
            canvas[top : top + height, left : left + width, :] = tile
    return canvas


def render_grid_for_entries(
    entries: list[ManifestEntry],
    mode: str,
    lambda_list,
    alpha_list,
    *,
    phase_source: str = "first",
    lambda_delta: float = 1.0,
    seed: int = 0,
) -> np.ndarray:
    """Render a sweep grid from the first pair of manifest entries."""
    if not entries:
        raise ParameterError("grid rendering needs at least one manifest entry")
    first = entries[0]
    second = entries[1] if len(entries) > 1 else entries[0]
    x_i = read_image(first.image_path)
    x_j = read_image(second.image_path)
    m_i = read_mask(first.mask_path) if first.mask_path else None
    m_j = read_mask(second.mask_path) if second.mask_path else None
    return render_grid(
        x_i, x_j, lambda_list, alpha_list, mode,
        m_i=m_i, m_j=m_j, phase_source=phase_source,
        lambda_delta=lambda_delta, seed=seed,
    )
