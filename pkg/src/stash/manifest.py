"""Disguise modes and the binary manifest that indexes hidden chunks.

Manifest record (little-endian): ``"STSH"``, u32 version=1, u8 mode,
u32 chunk_count, u64 total_bytes, u32 label_len, label (UTF-8), then per
chunk u32 key_len, key, u32 byte_len, u32 crc32.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Sequence

from ..exceptions import UsageError
from .exceptions import ManifestCorruptError

MANIFEST_MAGIC = b"STSH"
MANIFEST_VERSION = 1
MAX_LABEL_BYTES = 1 << 16
MAX_MANIFEST_KEY_BYTES = 4096

_HEAD = struct.Struct("<4sIBIQI")
_U32 = struct.Struct("<I")


class DisguiseKind(IntEnum):
    DEDICATED = 0
    MIMIC = 1


@dataclass(frozen=True)
class DisguiseMode:
    """How hidden chunks are named and typed inside the carrier."""

    kind: DisguiseKind
    secret: str = ""

    def __post_init__(self) -> None:
        if self.kind is DisguiseKind.MIMIC and not self.secret:
            raise UsageError("MimicKeys 模式需要非空 secret")

    @classmethod
    def dedicated(cls) -> "DisguiseMode":
        return cls(DisguiseKind.DEDICATED)

    @classmethod
    def mimic(cls, secret: str) -> "DisguiseMode":
        return cls(DisguiseKind.MIMIC, secret)

    @classmethod
    def parse(cls, name: str, secret: str | None = None) -> "DisguiseMode":
        normalized = name.strip().lower()
        if normalized in {"dedicated", "dedicatedkeys", "dedicated_keys"}:
            return cls.dedicated()
        if normalized in {"mimic", "mimickeys", "mimic_keys"}:
            return cls.mimic(secret or "")
        raise UsageError(f"未知的伪装模式: {name}")

    @property
    def name(self) -> str:
        return "dedicated" if self.kind is DisguiseKind.DEDICATED else "mimic"


@dataclass(frozen=True)
class ChunkRecord:
    key: str
    byte_len: int
    crc32: int


@dataclass
class PayloadManifest:
    """Index of the hidden chunks: order, true lengths, and CRC32s."""

    mode: DisguiseKind
    total_bytes: int
    chunks: List[ChunkRecord] = field(default_factory=list)
    label: str = ""
    version: int = MANIFEST_VERSION

    @property
    def chunk_count(self) -> int:
        return len(self.chunks)

    def to_bytes(self) -> bytes:
        label = self.label.encode("utf-8")
        parts = [
            _HEAD.pack(
                MANIFEST_MAGIC,
                self.version,
                int(self.mode),
                len(self.chunks),
                self.total_bytes,
                len(label),
            ),
            label,
        ]
        for chunk in self.chunks:
            key = chunk.key.encode("utf-8")
            parts.append(_U32.pack(len(key)))
            parts.append(key)
            parts.append(struct.pack("<II", chunk.byte_len, chunk.crc32))
        return b"".join(parts)

    @staticmethod
    def encoded_size(label: str, keys: Sequence[str]) -> int:
        return (
            _HEAD.size
            + len(label.encode("utf-8"))
            + sum(4 + len(key.encode("utf-8")) + 8 for key in keys)
        )

    @classmethod
    def from_bytes(cls, data: bytes, *, allow_padding: bool = False) -> "PayloadManifest":
        """Parse a manifest record; anything malformed raises ManifestCorruptError.

        With ``allow_padding`` up to three trailing zero bytes (F32 padding)
        are accepted.
        """
        view = memoryview(data)
        if len(view) < _HEAD.size:
            raise ManifestCorruptError("manifest 头部被截断")
        magic, version, mode, count, total, label_len = _HEAD.unpack_from(view)
        if magic != MANIFEST_MAGIC:
            raise ManifestCorruptError(f"manifest magic 错误: {magic!r}")
        if version != MANIFEST_VERSION:
            raise ManifestCorruptError(f"不支持的 manifest 版本 {version}")
        try:
            kind = DisguiseKind(mode)
        except ValueError as exc:
            raise ManifestCorruptError(f"未知的 manifest 模式 {mode}") from exc
        if label_len > MAX_LABEL_BYTES:
            raise ManifestCorruptError(f"label 长度 {label_len} 超出上限")

        offset = _HEAD.size
        end = offset + label_len
        if end > len(view):
            raise ManifestCorruptError("manifest label 被截断")
        try:
            label = view[offset:end].tobytes().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ManifestCorruptError("manifest label 不是合法 UTF-8") from exc
        offset = end

        chunks: List[ChunkRecord] = []
        for index in range(count):
            if offset + 4 > len(view):
                raise ManifestCorruptError(f"chunk 记录 {index} 被截断")
            (key_len,) = _U32.unpack_from(view, offset)
            offset += 4
            if key_len == 0 or key_len > MAX_MANIFEST_KEY_BYTES or offset + key_len + 8 > len(view):
                raise ManifestCorruptError(f"chunk 记录 {index} 的 key 长度无效")
            try:
                key = view[offset : offset + key_len].tobytes().decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ManifestCorruptError(f"chunk 记录 {index} 的 key 不是合法 UTF-8") from exc
            offset += key_len
            byte_len, crc = struct.unpack_from("<II", view, offset)
            offset += 8
            chunks.append(ChunkRecord(key=key, byte_len=byte_len, crc32=crc))

        trailing = view[offset:].tobytes()
        if trailing and not (allow_padding and len(trailing) < 4 and not any(trailing)):
            raise ManifestCorruptError(f"manifest 之后存在 {len(trailing)} 字节多余数据")
        if sum(chunk.byte_len for chunk in chunks) != total:
            raise ManifestCorruptError("chunk 长度之和与 total_bytes 不一致")
        return cls(mode=kind, total_bytes=total, chunks=chunks, label=label, version=version)
