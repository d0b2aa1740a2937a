"""Raw DEFLATE (RFC 1951, no zlib header) helpers."""

from __future__ import annotations

import zlib

from .exceptions import CodecCorruptionError

MAX_LEVEL = 9


def deflate_raw(data: bytes, level: int = MAX_LEVEL) -> bytes:
    compressor = zlib.compressobj(level, zlib.DEFLATED, -zlib.MAX_WBITS, zlib.DEF_MEM_LEVEL, 0)
    return compressor.compress(data) + compressor.flush()


def inflate_raw(data: bytes, max_length: int) -> bytes:
    """Inflate a complete raw stream of at most ``max_length`` bytes."""
    decompressor = zlib.decompressobj(-zlib.MAX_WBITS)
    try:
        inflated = decompressor.decompress(data, max_length + 1)
    except zlib.error as exc:
        raise CodecCorruptionError(f"DEFLATE 数据损坏: {exc}") from exc
    if len(inflated) > max_length:
        raise CodecCorruptionError(f"DEFLATE 解压结果超过 {max_length} 字节")
    if not decompressor.eof:
        raise CodecCorruptionError("DEFLATE 数据被截断")
    if decompressor.unused_data:
        raise CodecCorruptionError("DEFLATE 流之后存在多余数据")
    return inflated


def compression_ratio(data: bytes, level: int = MAX_LEVEL) -> float:
    """Compressed-to-raw size ratio; 0.0 for empty input."""
    if not data:
        return 0.0
    return len(deflate_raw(data, level)) / len(data)
