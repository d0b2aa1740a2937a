"""Weight containers (WDC and NPZ) that carry model tensors and hidden entries."""

from __future__ import annotations

from pathlib import Path

from .exceptions import (
    BadMagicError,
    CheckpointError,
    DuplicateKeyError,
    InvalidDTypeError,
    InvalidKeyError,
    LengthOverflowError,
    MalformedArchiveError,
    ManifestFormatError,
    MissingKeyError,
    ShapeMismatchError,
    TrailingDataError,
    TruncatedError,
    UnsupportedLayoutError,
    UnsupportedVersionError,
)
from .models import (
    ArchitectureManifest,
    Checkpoint,
    ContainerFormat,
    DTypeCode,
    ManifestEntry,
    TensorEntry,
    wdc_entry_size,
)
from .npz import parse_npz, read_npz, serialize_npz, write_npz
from .wdc import parse_wdc, read_wdc, serialize_wdc, write_wdc


def load_checkpoint(path: str | Path, fmt: ContainerFormat | str | None = None) -> Checkpoint:
    """Read a checkpoint, choosing the container from ``fmt`` or the file suffix."""
    fmt = ContainerFormat(fmt) if fmt is not None else ContainerFormat.guess(path)
    return read_npz(path) if fmt is ContainerFormat.NPZ else read_wdc(path)


def save_checkpoint(
    checkpoint: Checkpoint, path: str | Path, fmt: ContainerFormat | str | None = None
) -> int:
    fmt = ContainerFormat(fmt) if fmt is not None else ContainerFormat.guess(path)
    return write_npz(checkpoint, path) if fmt is ContainerFormat.NPZ else write_wdc(checkpoint, path)


__all__ = [
    "ArchitectureManifest",
    "BadMagicError",
    "Checkpoint",
    "CheckpointError",
    "ContainerFormat",
    "DTypeCode",
    "DuplicateKeyError",
    "InvalidDTypeError",
    "InvalidKeyError",
    "LengthOverflowError",
    "MalformedArchiveError",
    "ManifestEntry",
    "ManifestFormatError",
    "MissingKeyError",
    "ShapeMismatchError",
    "TensorEntry",
    "TrailingDataError",
    "TruncatedError",
    "UnsupportedLayoutError",
    "UnsupportedVersionError",
    "load_checkpoint",
    "parse_npz",
    "parse_wdc",
    "read_npz",
    "read_wdc",
    "save_checkpoint",
    "serialize_npz",
    "serialize_wdc",
    "wdc_entry_size",
    "write_npz",
    "write_wdc",
]
