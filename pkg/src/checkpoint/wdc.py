"""WDC: a bit-exact, little-endian weight container.

Layout: ``"WDC1"``, u32 version=1, u64 entry_count, then per entry
u32 key_len, key bytes (UTF-8), u8 dtype, u8 ndim, ndim × u64 dims,
u64 payload_len, payload. No padding, alignment, or footer.
"""

from __future__ import annotations

import struct
from pathlib import Path

from ..utils import setup_logger
from .exceptions import (
    BadMagicError,
    DuplicateKeyError,
    InvalidDTypeError,
    InvalidKeyError,
    LengthOverflowError,
    ShapeMismatchError,
    TrailingDataError,
    TruncatedError,
    UnsupportedVersionError,
)
from .models import (
    MAX_KEY_BYTES,
    MAX_PAYLOAD_BYTES,
    Checkpoint,
    ContainerFormat,
    DTypeCode,
    TensorEntry,
    element_count,
)

logger = setup_logger(__name__)

WDC_MAGIC = b"WDC1"
WDC_VERSION = 1

_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


class _Reader:
    """Bounds-checked cursor over the input bytes."""

    def __init__(self, data: bytes) -> None:
        self._view = memoryview(data)
        self.offset = 0

    @property
    def remaining(self) -> int:
        return len(self._view) - self.offset

    def take(self, size: int, what: str) -> bytes:
        if size > self.remaining:
            raise TruncatedError(f"{what} 在偏移 {self.offset} 处被截断 (需要 {size}，剩余 {self.remaining})")
        chunk = self._view[self.offset : self.offset + size].tobytes()
        self.offset += size
        return chunk

    def u8(self, what: str) -> int:
        return _U8.unpack(self.take(1, what))[0]

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(4, what))[0]

    def u64(self, what: str) -> int:
        return _U64.unpack(self.take(8, what))[0]


def serialize_wdc(checkpoint: Checkpoint) -> bytes:
    parts = [WDC_MAGIC, _U32.pack(WDC_VERSION), _U64.pack(len(checkpoint))]
    for entry in checkpoint:
        key = entry.key.encode("utf-8")
        parts.append(_U32.pack(len(key)))
        parts.append(key)
        parts.append(_U8.pack(int(entry.dtype)))
        parts.append(_U8.pack(len(entry.shape)))
        parts.extend(_U64.pack(dim) for dim in entry.shape)
        parts.append(_U64.pack(len(entry.payload)))
        parts.append(entry.payload)
    return b"".join(parts)


def _parse_entry(reader: _Reader, index: int) -> TensorEntry:
    key_len = reader.u32("key_len")
    if key_len > MAX_KEY_BYTES:
        raise LengthOverflowError(f"entry {index}: key_len {key_len} 超过 {MAX_KEY_BYTES}")
    if key_len == 0:
        raise InvalidKeyError(f"entry {index}: key 为空")
    raw_key = reader.take(key_len, "key")
    try:
        key = raw_key.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidKeyError(f"entry {index}: key 不是合法 UTF-8") from exc

    code = reader.u8("dtype")
    try:
        dtype = DTypeCode(code)
    except ValueError as exc:
        raise InvalidDTypeError(f"entry {index} ({key}): 未知 dtype 代码 {code}") from exc

    ndim = reader.u8("ndim")
    shape = tuple(reader.u64("dim") for _ in range(ndim))
    payload_len = reader.u64("payload_len")
    if payload_len > MAX_PAYLOAD_BYTES:
        raise LengthOverflowError(f"entry {index} ({key}): payload_len {payload_len} 超过 2^40")
    expected = element_count(shape) * dtype.width
    if expected != payload_len:
        if expected > MAX_PAYLOAD_BYTES:
            raise LengthOverflowError(f"entry {index} ({key}): shape {shape} 声明的字节数溢出")
        raise ShapeMismatchError(
            f"entry {index} ({key}): shape {shape} 需要 {expected} 字节，声明 {payload_len}"
        )
    payload = reader.take(payload_len, "payload")
    return TensorEntry(key=key, dtype=dtype, shape=shape, payload=payload)


def parse_wdc(data: bytes) -> Checkpoint:
    """Exact inverse of serialize_wdc; raises only CheckpointError subclasses."""
    reader = _Reader(data)
    magic = reader.take(4, "magic")
    if magic != WDC_MAGIC:
        raise BadMagicError(f"WDC magic 错误: {magic!r}")
    version = reader.u32("version")
    if version != WDC_VERSION:
        raise UnsupportedVersionError(f"不支持的 WDC 版本 {version}")
    count = reader.u64("entry_count")

    checkpoint = Checkpoint(format=ContainerFormat.WDC)
    seen: set[str] = set()
    for index in range(count):
        if reader.remaining == 0:
            raise TruncatedError(f"声明 {count} 个 entry，但在第 {index} 个处结束")
        entry = _parse_entry(reader, index)
        if entry.key in seen:
            raise DuplicateKeyError(f"重复的 tensor key: {entry.key}")
        seen.add(entry.key)
        checkpoint.entries.append(entry)

    if reader.remaining:
        raise TrailingDataError(f"entry 之后存在 {reader.remaining} 字节多余数据")
    return checkpoint


def write_wdc(checkpoint: Checkpoint, path: str | Path) -> int:
    """Write a WDC file; returns the exact file size."""
    data = serialize_wdc(checkpoint)
    Path(path).write_bytes(data)
    logger.debug("💾 WDC 写入 %s: %s 个 entry, %s 字节", path, len(checkpoint), len(data))
    return len(data)


def read_wdc(path: str | Path) -> Checkpoint:
    return parse_wdc(Path(path).read_bytes())


__all__ = ["parse_wdc", "read_wdc", "serialize_wdc", "write_wdc"]
