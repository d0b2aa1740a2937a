"""Errors raised while building or parsing weight containers."""

from ..exceptions import DataError


class CheckpointError(DataError):
    """Base class for checkpoint errors; parsers raise nothing else."""

    pass


class BadMagicError(CheckpointError):
    pass


class UnsupportedVersionError(CheckpointError):
    pass


class TruncatedError(CheckpointError):
    """Input ended before a declared field or payload."""

    pass


class TrailingDataError(CheckpointError):
    """Bytes remain after the declared entries."""

    pass


class LengthOverflowError(CheckpointError):
    """A declared length exceeds the format limits."""

    pass


class DuplicateKeyError(CheckpointError):
    pass


class MissingKeyError(CheckpointError):
    pass


class InvalidKeyError(CheckpointError):
    """Key is empty, too long, or not valid UTF-8."""

    pass


class InvalidDTypeError(CheckpointError):
    pass


class ShapeMismatchError(CheckpointError):
    """Payload length disagrees with shape × dtype width."""

    pass


class UnsupportedLayoutError(CheckpointError):
    """NPY member is Fortran-ordered, or uses an unsupported descr/version."""

    pass


class MalformedArchiveError(CheckpointError):
    """ZIP structure or NPY header cannot be read."""

    pass


class ManifestFormatError(CheckpointError):
    """Architecture manifest JSON is malformed."""

    pass
