"""Array conventions and validation helpers.

Images are float64 arrays of shape (H, W, C) with C in {1, 3} and nominal
range [0, 1]. Labels are probability vectors of shape (K,). Masks are (H, W)
soft foreground maps in [0, 1], handled in the context module.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericalIntegrityError, ParameterError

LABEL_SUM_TOL = 1e-6


def as_image(x) -> np.ndarray:
    """Coerce to a float64 (H, W, C) image and check layout and finiteness."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3 or x.shape[2] not in (1, 3):
        raise DimensionError(
            f"expected an (H, W, C) image with C in {{1, 3}}, got shape {x.shape}"
        )
    if x.shape[0] < 1 or x.shape[1] < 1:
        raise DimensionError(f"image must have at least one pixel, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NumericalIntegrityError("image contains non-finite values")
    return x


def as_label(y, classes: int | None = None) -> np.ndarray:
    """Coerce to a float64 probability vector and check simplex membership."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size < 1:
        raise DimensionError(f"expected a 1-D label vector, got shape {y.shape}")
    if classes is not None and y.size != classes:
        raise DimensionError(f"label has {y.size} entries, expected {classes}")
    if not np.all(np.isfinite(y)):
        raise NumericalIntegrityError("label contains non-finite values")
    if y.min() < 0.0:
        raise ParameterError("label entries must be non-negative")
    total = float(y.sum())
    if abs(total - 1.0) > LABEL_SUM_TOL:
        raise ParameterError(f"label entries sum to {total}, expected 1")
    return y


def one_hot(index: int, classes: int) -> np.ndarray:
    if classes < 1:
        raise ParameterError(f"class count must be >= 1, got {classes}")
    if not 0 <= index < classes:
        raise ParameterError(f"class index {index} out of range for {classes} classes")
    y = np.zeros(classes, dtype=np.float64)
    y[index] = 1.0
    return y


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"operand shapes differ: {a.shape} vs {b.shape}")


def check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return value


def clamp01(x: np.ndarray) -> np.ndarray:
    return np.clip(x, 0.0, 1.0)
