"""Hide byte payloads as extra tensor entries and pull them back out."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator, List

from ..checkpoint import Checkpoint, MissingKeyError, TensorEntry, wdc_entry_size
from ..checkpoint.models import DTypeCode
from ..config import MIN_CHUNK_SIZE
from ..exceptions import UsageError
from ..utils import ceil_div, crc32, setup_logger, u32_le
from .exceptions import (
    CrcMismatchError,
    EmptyPayloadError,
    KeyCollisionError,
    ManifestCorruptError,
    MissingChunkError,
    NoManifestError,
)
from .manifest import ChunkRecord, DisguiseKind, DisguiseMode, PayloadManifest

logger = setup_logger(__name__)

DEDICATED_PREFIX = "__stash/"
MIMIC_PREFIX = "opt_state/"
MANIFEST_INDEX = 0xFFFFFFFF
MAX_CHUNKS = MANIFEST_INDEX - 1


def chunk_key(mode: DisguiseMode, index: int) -> str:
    if mode.kind is DisguiseKind.DEDICATED:
        return f"{DEDICATED_PREFIX}chunk_{index:08d}"
    digest = hashlib.sha256(mode.secret.encode("utf-8") + u32_le(index)).hexdigest()
    return MIMIC_PREFIX + digest[:32]


def manifest_key(mode: DisguiseMode) -> str:
    if mode.kind is DisguiseKind.DEDICATED:
        return DEDICATED_PREFIX + "manifest"
    return chunk_key(mode, MANIFEST_INDEX)


def _padded_len(mode: DisguiseMode, length: int) -> int:
    return length if mode.kind is DisguiseKind.DEDICATED else ceil_div(length, 4) * 4


def _as_entry(mode: DisguiseMode, key: str, data: bytes) -> TensorEntry:
    if mode.kind is DisguiseKind.DEDICATED:
        return TensorEntry(key=key, dtype=DTypeCode.U8, shape=(len(data),), payload=data)
    padded = data + b"\x00" * (_padded_len(mode, len(data)) - len(data))
    return TensorEntry(key=key, dtype=DTypeCode.F32, shape=(len(padded) // 4,), payload=padded)


def _check_chunking(payload_len: int, chunk_size: int) -> int:
    if chunk_size < MIN_CHUNK_SIZE:
        raise UsageError(f"chunk_size 必须 ≥ {MIN_CHUNK_SIZE}，当前 {chunk_size}")
    if payload_len <= 0:
        raise EmptyPayloadError("payload 不能为空")
    count = ceil_div(payload_len, chunk_size)
    if count > MAX_CHUNKS:
        raise UsageError(f"chunk 数量 {count} 超过上限 {MAX_CHUNKS}")
    return count


def _chunk_lengths(payload_len: int, chunk_size: int, count: int) -> Iterator[int]:
    for index in range(count):
        yield min(chunk_size, payload_len - index * chunk_size)


@dataclass
class EmbedResult:
    checkpoint: Checkpoint
    manifest: PayloadManifest
    added_bytes: int


def embed(
    carrier: Checkpoint,
    payload: bytes,
    mode: DisguiseMode,
    chunk_size: int,
    *,
    label: str = "",
) -> EmbedResult:
    """Append payload chunks plus a manifest entry to a copy of ``carrier``.

    Pre-existing entries are left untouched and keep their order.
    """
    count = _check_chunking(len(payload), chunk_size)
    keys = [chunk_key(mode, index) for index in range(count)]
    all_keys = keys + [manifest_key(mode)]

    existing = set(carrier.keys)
    collisions = [key for key in all_keys if key in existing]
    if collisions:
        raise KeyCollisionError(f"载体中已存在 stash key: {collisions[0]}")

    result = carrier.copy()
    records: List[ChunkRecord] = []
    view = memoryview(payload)
    for index, key in enumerate(keys):
        data = view[index * chunk_size : (index + 1) * chunk_size].tobytes()
        records.append(ChunkRecord(key=key, byte_len=len(data), crc32=crc32(data)))
        result.add_entry(_as_entry(mode, key, data))

    manifest = PayloadManifest(mode=mode.kind, total_bytes=len(payload), chunks=records, label=label)
    result.add_entry(_as_entry(mode, all_keys[-1], manifest.to_bytes()))

    added = result.total_size() - carrier.total_size()
    logger.info(
        "🧩 已嵌入 payload: %s 字节，%s 个 chunk，模式=%s，新增 %s 字节",
        len(payload),
        count,
        mode.name,
        added,
    )
    return EmbedResult(checkpoint=result, manifest=manifest, added_bytes=added)


def extract(checkpoint: Checkpoint, mode: DisguiseMode) -> tuple[bytes, PayloadManifest]:
    """Reassemble a payload; every chunk's CRC32 is verified."""
    key = manifest_key(mode)
    try:
        manifest_entry = checkpoint.get_entry(key)
    except MissingKeyError as exc:
        raise NoManifestError(f"未找到 {mode.name} 模式的 manifest") from exc

    manifest = PayloadManifest.from_bytes(
        manifest_entry.payload, allow_padding=mode.kind is DisguiseKind.MIMIC
    )
    if manifest.mode is not mode.kind:
        raise ManifestCorruptError(f"manifest 模式 {manifest.mode.name} 与请求的 {mode.name} 不一致")

    parts: List[bytes] = []
    for index, record in enumerate(manifest.chunks):
        try:
            entry = checkpoint.get_entry(record.key)
        except MissingKeyError as exc:
            raise MissingChunkError(index, record.key) from exc
        if len(entry.payload) < record.byte_len:
            raise ManifestCorruptError(f"chunk {index} 长度不足: {len(entry.payload)} < {record.byte_len}")
        data = entry.payload[: record.byte_len]
        actual = crc32(data)
        if actual != record.crc32:
            raise CrcMismatchError(index, record.crc32, actual)
        parts.append(data)

    payload = b"".join(parts)
    logger.info("📦 已提取 payload: %s 字节，%s 个 chunk", len(payload), manifest.chunk_count)
    return payload, manifest


def embedding_overhead(
    payload_len: int, mode: DisguiseMode, chunk_size: int, *, label: str = ""
) -> int:
    """Exact WDC bytes that ``embed`` adds for a payload of this length."""
    count = _check_chunking(payload_len, chunk_size)
    total = 0
    keys: List[str] = []
    for index, length in enumerate(_chunk_lengths(payload_len, chunk_size, count)):
        key = chunk_key(mode, index)
        keys.append(key)
        total += wdc_entry_size(key, 1, _padded_len(mode, length))
    manifest_len = PayloadManifest.encoded_size(label, keys)
    total += wdc_entry_size(manifest_key(mode), 1, _padded_len(mode, manifest_len))
    return total

