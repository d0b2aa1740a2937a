"""Errors raised by the slice/volume codec and the lossless path."""

from ..exceptions import DataError


class CodecError(DataError):
    """Base class for codec data errors."""

    pass


class CodecFormatError(CodecError):
    """Bad magic, unsupported version, or truncated header."""

    pass


class CodecCorruptionError(CodecError):
    """The DEFLATE stream or varint stream cannot be decoded."""

    pass


class CoefficientCountError(CodecError):
    pass


class ArchiveError(CodecError):
    """A ZIP produced by zip_volume / zip_mask cannot be read back."""

    pass
