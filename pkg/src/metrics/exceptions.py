"""Errors raised while computing fidelity and segmentation metrics."""

from ..exceptions import DataError


class MetricsError(DataError):
    pass


class DimensionMismatchError(MetricsError):
    """Inputs (or their voxel spacings) do not line up."""

    pass


class InputTooSmallError(MetricsError):
    pass


class EmptyMaskError(MetricsError):
    """A mask has no foreground voxels, so it has no surface."""

    pass
