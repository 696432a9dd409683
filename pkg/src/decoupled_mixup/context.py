"""Foreground/background decoupled mixing driven by soft saliency masks.

Masks are used as-is (no binarization); the background is the complement
1 - mask and compositing is per-pixel multiplication.
"""

from __future__ import annotations

import numpy as np

from .errors import MaskError
from .mix import MixParams, _convex, decoupled_label
from .tensors import as_image, clamp01, require_same_shape

# Mask values may drift slightly out of [0, 1] through 8-bit IO or resampling;
# drift up to this much is clamped, anything larger is rejected.
MASK_CLAMP_TOL = 1e-3


def validate_mask(mask, image) -> np.ndarray:
    """Check a soft mask against its image and return it clamped to [0, 1]."""
    m = np.asarray(mask, dtype=np.float64)
    if m.ndim == 3 and m.shape[2] == 1:
        m = m[:, :, 0]
    if m.ndim != 2:
        raise MaskError(f"expected an (H, W) mask, got shape {m.shape}")
    x = as_image(image)
    if m.shape != x.shape[:2]:
        raise MaskError(f"mask shape {m.shape} does not match image {x.shape[:2]}")
    if not np.all(np.isfinite(m)):
        raise MaskError("mask contains non-finite values")
    low = float(m.min())
    high = float(m.max())
    if low < -MASK_CLAMP_TOL or high > 1.0 + MASK_CLAMP_TOL:
        raise MaskError(
            f"mask values span [{low:.6g}, {high:.6g}], outside [0, 1] "
            f"beyond the {MASK_CLAMP_TOL} tolerance"
        )
    return np.clip(m, 0.0, 1.0)


def cd_mixup(
    x_i,
    m_i,
    x_j,
    m_j,
    y_i,
    y_j,
    params: MixParams,
    clamp: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Mix foregrounds with lambda_v and backgrounds with lambda_delta.

    The composite is the sum of the two region mixes and is clamped only after
    summation (clamp=False exposes the raw algebra). Labels fuse via the
    alpha-weighted rule.
    """
    x_i = as_image(x_i)
    x_j = as_image(x_j)
    require_same_shape(x_i, x_j)
    m_i = validate_mask(m_i, x_i)[:, :, None]
    m_j = validate_mask(m_j, x_j)[:, :, None]

    foreground = _convex(m_i * x_i, m_j * x_j, params.lambda_v)
    background = _convex((1.0 - m_i) * x_i, (1.0 - m_j) * x_j, params.lambda_delta)
    out = foreground + background

    label = decoupled_label(y_i, y_j, params.lambda_v, params.lambda_delta, params.alpha)
    return (clamp01(out) if clamp else out), label
