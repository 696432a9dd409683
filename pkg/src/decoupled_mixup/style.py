"""Channel-statistics transfer (AdaIN) and style-decoupled mixing.

These operate on any (H, W, C) tensor; applying them to raw images is a
demonstration surface, since style statistics are usually taken from network
feature maps.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .mix import MixParams, decoupled_label
from .tensors import as_image, as_label, clamp01, require_same_shape

ADAIN_EPS = 1e-5


class ChannelStats(NamedTuple):
    mean: np.ndarray  # (C,)
    std: np.ndarray  # (C,) population standard deviation


def channel_stats(u) -> ChannelStats:
    """Per-channel mean and population std over the spatial grid."""
    u = as_image(u)
    flat = u.reshape(-1, u.shape[2])
    return ChannelStats(flat.mean(axis=0), flat.std(axis=0))


def adain(u_i, u_j) -> np.ndarray:
    """Renormalize u_i per channel to carry u_j's mean and std."""
    u_i = as_image(u_i)
    u_j = as_image(u_j)
    require_same_shape(u_i, u_j)
    mean_i, std_i = channel_stats(u_i)
    mean_j, std_j = channel_stats(u_j)
    return std_j * (u_i - mean_i) / (std_i + ADAIN_EPS) + mean_j


def style_features(
    u_i, u_j
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four content/style recombinations (ii, jj, ij, ji).

    u_ij carries the content of u_i under the style statistics of u_j.
    """
    u_ii = adain(u_i, u_i)
    u_jj = adain(u_j, u_j)
    u_ij = adain(u_i, u_j)
    u_ji = adain(u_j, u_i)
    return u_ii, u_jj, u_ij, u_ji


def style_mixup(
    u_i,
    u_j,
    y_i,
    y_j,
    params: MixParams,
    clamp: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Style-decoupled mixing of two tensors.

    The common part blends self-styled content (weight style_t), cross-styled
    content (lambda_v - style_t) and the second operand (1 - lambda_v). The
    noise-prone residual u_ji - u_jj is the same for both operands, so its mix
    is independent of lambda_delta; alpha scales it down in the output, with
    alpha = 1 suppressing it entirely. Labels fuse via the alpha-weighted rule,
    where lambda_delta acts on the label side only.
    """
    y_i = as_label(y_i)
    y_j = as_label(y_j)
    u_ii, u_jj, u_ij, u_ji = style_features(u_i, u_j)
    t = params.style_t
    common = t * u_ii + (params.lambda_v - t) * u_ij + (1.0 - params.lambda_v) * u_jj
    noise = u_ji - u_jj
    out = common + (1.0 - params.alpha) * noise
    label = decoupled_label(y_i, y_j, params.lambda_v, params.lambda_delta, params.alpha)
    return (clamp01(out) if clamp else out), label
