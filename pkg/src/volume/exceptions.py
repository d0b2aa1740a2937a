"""Errors raised by volume I/O and tiling."""

from ..exceptions import DataError


class VolumeError(DataError):
    """Base class for volume errors."""

    pass


class BadMagicError(VolumeError):
    """File does not start with the RVOL magic."""

    pass


class UnsupportedVersionError(VolumeError):
    """RVOL version is not 1."""

    pass


class TruncatedError(VolumeError):
    """Header or voxel payload ends before the declared size."""

    pass


class PayloadLengthError(VolumeError):
    """Voxel payload is longer than the declared dimensions allow."""

    pass


class SidecarError(VolumeError):
    """RAW sidecar JSON is missing fields or malformed."""

    pass


class VolumeShapeError(VolumeError):
    """Dimensions are non-positive or the array is not 3-D."""

    pass


class RangeMetadataError(VolumeError):
    """Intensity range metadata is absent or inconsistent."""

    pass


class UnsupportedGeometryError(VolumeError):
    """In-plane size cannot be tiled with the requested mode."""

    pass


class MissingPatchError(VolumeError):
    """A patch required by the tiling plan is absent."""

    pass


class PlanMismatchError(VolumeError):
    """Slice stacks do not agree with the tiling plan."""

    pass
