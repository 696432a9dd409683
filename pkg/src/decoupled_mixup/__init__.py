"""Deterministic image-augmentation engine built around decoupled mixing.

Images are mixed four ways besides plain mixup and CutMix: by foreground and
background regions (context), by low- and high-frequency amplitude bands
(frequency), and by content and style statistics (AdaIN). Every operator is a
pure function of its inputs and an explicit counter-based random stream.
"""

__version__ = "0.1.0"

from .context import cd_mixup, validate_mask
from .errors import (
    DimensionError,
    ManifestError,
    MaskError,
    MixupError,
    NumericalIntegrityError,
    ParameterError,
)
from .freq import (
    FrequencyMask,
    amplitude,
    dft2,
    fd_mixup,
    idft2,
    low_freq_mask,
    mirror_frequencies,
    phase,
)
from .manifest import ManifestEntry, load_manifest
from .mix import (
    MixParams,
    convex_mix,
    cutmix,
    decoupled_label,
    decoupled_mix,
    mix_labels,
    sample_cut_box,
    sample_lambda,
)
from .pipeline import (
    MixOutcome,
    RunConfig,
    RunReport,
    mix_pair,
    pair_items,
    render_grid,
    run_batch,
)
from .rng import RngStream
from .style import ChannelStats, adain, channel_stats, style_features, style_mixup
from .tensors import as_image, as_label, clamp01, one_hot

__all__ = [
    "__version__",
    "MixupError",
    "DimensionError",
    "ParameterError",
    "MaskError",
    "ManifestError",
    "NumericalIntegrityError",
    "RngStream",
    "MixParams",
    "convex_mix",
    "mix_labels",
    "decoupled_mix",
    "decoupled_label",
    "sample_lambda",
    "sample_cut_box",
    "cutmix",
    "dft2",
    "idft2",
    "amplitude",
    "phase",
    "low_freq_mask",
    "mirror_frequencies",
    "FrequencyMask",
    "fd_mixup",
    "validate_mask",
    "cd_mixup",
    "ChannelStats",
    "channel_stats",
    "adain",
    "style_features",
    "style_mixup",
    "ManifestEntry",
    "load_manifest",
    "RunConfig",
    "RunReport",
    "MixOutcome",
    "mix_pair",
    "pair_items",
    "run_batch",
    "render_grid",
    "as_image",
    "as_label",
    "one_hot",
    "clamp01",
]
