"""Convex mixing primitives: plain mixup, decoupled mixing and CutMix.

All operators are pure functions of their arguments; randomized ones take an
explicit RngStream so results are reproducible from (seed, counter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .rng import RngStream
from .tensors import (
    as_image,
    as_label,
    check_unit_interval,
    clamp01,
    require_same_shape,
)


@dataclass(frozen=True)
class MixParams:
    """Scalar knobs shared by the decoupled mixing operators.

    lambda_v weighs the common-pattern (discriminative) component, lambda_delta
    the noise-prone one, alpha the label-side balance between them. style_t is
    the self-content weight used only by style mixing and must not exceed
    lambda_v.
    """

    lambda_v: float
    lambda_delta: float
    alpha: float
    beta_shape: float = 1.0
    style_t: float = 0.0

    def __post_init__(self):
        check_unit_interval("lambda_v", self.lambda_v)
        check_unit_interval("lambda_delta", self.lambda_delta)
        check_unit_interval("alpha", self.alpha)
        if not self.beta_shape > 0:
            raise ParameterError(f"beta_shape must be > 0, got {self.beta_shape}")
        if not 0.0 <= self.style_t <= self.lambda_v:
            raise ParameterError(
                f"style_t must lie in [0, lambda_v={self.lambda_v}], got {self.style_t}"
            )


def _convex(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    # Shared by every mixing path so identical inputs give bit-identical sums.
    return lam * a + (1.0 - lam) * b


def convex_mix(x_i, x_j, lam: float) -> np.ndarray:
    """Elementwise lam * x_i + (1 - lam) * x_j."""
    x_i = as_image(x_i)
    x_j = as_image(x_j)
    require_same_shape(x_i, x_j)
    check_unit_interval("lambda", lam)
    return _convex(x_i, x_j, lam)


def mix_labels(y_i, y_j, lam: float) -> np.ndarray:
    """Convex combination of two probability vectors."""
    y_i = as_label(y_i)
    y_j = as_label(y_j)
    require_same_shape(y_i, y_j)
    check_unit_interval("lambda", lam)
    return as_label(_convex(y_i, y_j, lam))


def decoupled_mix(
    v_i,
    delta_i,
    v_j,
    delta_j,
    lambda_v: float,
    lambda_delta: float,
    clamp: bool = True,
) -> np.ndarray:
    """Mix common patterns and noise-prone parts with separate ratios.

    The two convex combinations are summed first and only then clamped, so the
    unclamped algebra is preserved internally (clamp=False exposes it).
    """
    v_i, delta_i = as_image(v_i), as_image(delta_i)
    v_j, delta_j = as_image(v_j), as_image(delta_j)
    require_same_shape(v_i, v_j)
    require_same_shape(delta_i, delta_j)
    require_same_shape(v_i, delta_i)
    check_unit_interval("lambda_v", lambda_v)
    check_unit_interval("lambda_delta", lambda_delta)
    out = _convex(v_i, v_j, lambda_v) + _convex(delta_i, delta_j, lambda_delta)
    return clamp01(out) if clamp else out


def decoupled_label(
    y_i, y_j, lambda_v: float, lambda_delta: float, alpha: float
) -> np.ndarray:
    """Fuse labels as alpha-weighted blend of the two mixing ratios."""
    y_i = as_label(y_i)
    y_j = as_label(y_j)
    require_same_shape(y_i, y_j)
    check_unit_interval("lambda_v", lambda_v)
    check_unit_interval("lambda_delta", lambda_delta)
    check_unit_interval("alpha", alpha)
    out = _convex(_convex(y_i, y_j, lambda_v), _convex(y_i, y_j, lambda_delta), alpha)
    return as_label(out)


def sample_lambda(rng: RngStream, beta_shape: float) -> float:
    """Draw a mixing ratio from Beta(beta_shape, beta_shape)."""
    if not beta_shape > 0:
        raise ParameterError(f"beta_shape must be > 0, got {beta_shape}")
    return float(rng.beta(beta_shape, beta_shape))


def sample_cut_box(
    rng: RngStream, height: int, width: int, lam: float
) -> tuple[int, int, int, int]:
    """Sample a paste rectangle of area ratio ~(1 - lam), always in bounds.

    Side lengths are round(H * sqrt(1 - lam)) x round(W * sqrt(1 - lam)) and
    the top-left corner is drawn uniformly over positions where the box fits.
    Returns (row0, col0, row1, col1) with exclusive end coordinates.
    """
    check_unit_interval("lambda", lam)
    cut = float(np.sqrt(1.0 - lam))
    box_h = int(np.rint(height * cut))
    box_w = int(np.rint(width * cut))
    row0 = int(rng.integers(0, height - box_h + 1))
    col0 = int(rng.integers(0, width - box_w + 1))
    return row0, col0, row0 + box_h, col0 + box_w


def apply_cut_box(
    x_i: np.ndarray, x_j: np.ndarray, box: tuple[int, int, int, int]
) -> np.ndarray:
    """Copy x_i and paste the box region from x_j into it."""
    r0, c0, r1, c1 = box
    out = np.array(x_i, dtype=np.float64, copy=True)
    out[r0:r1, c0:c1, :] = x_j[r0:r1, c0:c1, :]
    return out


def cut_area_ratio(box: tuple[int, int, int, int], height: int, width: int) -> float:
    r0, c0, r1, c1 = box
    return ((r1 - r0) * (c1 - c0)) / (height * width)


def cutmix(
    x_i, x_j, y_i, y_j, lam: float, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """Region-based mixing: paste a random box from x_j into x_i.

    The label is mixed with the realized area ratio, not the requested lam,
    so it always matches the pixels actually pasted.
    """
    x_i = as_image(x_i)
    x_j = as_image(x_j)
    require_same_shape(x_i, x_j)
    height, width = x_i.shape[:2]
    box = sample_cut_box(rng, height, width, lam)
    mixed = apply_cut_box(x_i, x_j, box)
    lam_actual = 1.0 - cut_area_ratio(box, height, width)
    return mixed, mix_labels(y_i, y_j, lam_actual)
