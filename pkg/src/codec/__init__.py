"""Lossy DCT volume codec and the lossless ZIP path."""

from .deflate import compression_ratio, deflate_raw, inflate_raw
from .exceptions import (
    ArchiveError,
    CodecCorruptionError,
    CodecError,
    CodecFormatError,
    CoefficientCountError,
)
from .lossless import (
    bpp,
    bpp_input,
    practical_ratio,
    unzip_mask,
    unzip_volume,
    zip_mask,
    zip_volume,
)
from .slice_codec import SliceCode, decode_slice, encode_slice
from .transform import quant_steps
from .volume_codec import (
    VolumeCode,
    decode_volume,
    encode_volume,
    read_volume_code,
    write_volume_code,
)

__all__ = [
    "ArchiveError",
    "CodecCorruptionError",
    "CodecError",
    "CodecFormatError",
    "CoefficientCountError",
    "SliceCode",
    "VolumeCode",
    "bpp",
    "bpp_input",
    "compression_ratio",
    "decode_slice",
    "decode_volume",
    "deflate_raw",
    "encode_slice",
    "encode_volume",
    "inflate_raw",
    "practical_ratio",
    "quant_steps",
    "read_volume_code",
    "unzip_mask",
    "unzip_volume",
    "write_volume_code",
    "zip_mask",
    "zip_volume",
]
