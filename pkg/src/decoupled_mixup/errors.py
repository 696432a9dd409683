"""Exception types shared across the package."""


class MixupError(Exception):
    """Base class for every error this package raises deliberately."""


class DimensionError(MixupError):
    """Operands disagree on shape, or a tensor has an unsupported layout."""


class ParameterError(MixupError):
    """A scalar parameter lies outside its valid range."""


class MaskError(MixupError):
    """A foreground mask is malformed or incompatible with its image."""


class ManifestError(MixupError):
    """A manifest file cannot be parsed or fails validation."""


class NumericalIntegrityError(MixupError):
    """A numerical invariant was violated (non-finite data, imaginary residue)."""
