"""Volume data model, file I/O, phantoms, and slice tiling."""

from .exceptions import (
    BadMagicError,
    MissingPatchError,
    PayloadLengthError,
    PlanMismatchError,
    RangeMetadataError,
    SidecarError,
    TruncatedError,
    UnsupportedGeometryError,
    UnsupportedVersionError,
    VolumeError,
    VolumeShapeError,
)
from .io import VolumeFormat, load_volume, parse_rvol, rvol_bytes, save_volume
from .models import PATCH_SIZE, SliceStack, TilingMode, TilingPlan, Volume
from .phantom import generate_phantom
from .tiling import (
    blend_patches,
    denormalize,
    make_slice_stacks,
    normalize_minmax,
    plan_for_dims,
    plan_tiling,
    reassemble_planes,
    reassemble_slices,
    slice_stacks_at,
)

__all__ = [
    "BadMagicError",
    "MissingPatchError",
    "PATCH_SIZE",
    "PayloadLengthError",
    "PlanMismatchError",
    "RangeMetadataError",
    "SidecarError",
    "SliceStack",
    "TilingMode",
    "TilingPlan",
    "TruncatedError",
    "UnsupportedGeometryError",
    "UnsupportedVersionError",
    "Volume",
    "VolumeError",
    "VolumeFormat",
    "VolumeShapeError",
    "blend_patches",
    "denormalize",
    "generate_phantom",
    "load_volume",
    "make_slice_stacks",
    "normalize_minmax",
    "parse_rvol",
    "plan_for_dims",
    "plan_tiling",
    "reassemble_planes",
    "reassemble_slices",
    "rvol_bytes",
    "save_volume",
    "slice_stacks_at",
]
