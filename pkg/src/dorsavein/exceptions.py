"""Exception types shared across the package."""


class DorsaVeinError(Exception):
    """Base class for all package errors."""


class InvalidParameter(DorsaVeinError):
    """A parameter is outside its documented range."""


class ImageTooSmall(DorsaVeinError):
    """Image dimensions are below the minimum required by the operation."""


class DegenerateImage(DorsaVeinError):
    """Image statistics make the operation undefined (e.g. zero variance)."""


class EmptyROI(DorsaVeinError):
    """Segmentation produced a region smaller than the usable minimum."""


class NoFeatures(DorsaVeinError):
    """No forking points were found on the skeleton."""


class DegenerateTemplate(DorsaVeinError):
    """Template geometry does not admit a stable normalization."""


class EmptyProbe(DorsaVeinError):
    """Probe template has no minutiae to match."""


class InsufficientData(DorsaVeinError):
    """Not enough identities or samples to run the evaluation protocol."""


class FormatError(DorsaVeinError):
    """A file does not conform to its expected on-disk format."""
