"""Payload embedding: hide byte payloads inside weight containers."""

from .embedding import (
    DEDICATED_PREFIX,
    MANIFEST_INDEX,
    MIMIC_PREFIX,
    EmbedResult,
    chunk_key,
    embed,
    embedding_overhead,
    extract,
    manifest_key,
)
from .exceptions import (
    CrcMismatchError,
    EmptyPayloadError,
    KeyCollisionError,
    ManifestCorruptError,
    MissingChunkError,
    NoManifestError,
    StashDataError,
)
from .manifest import ChunkRecord, DisguiseKind, DisguiseMode, PayloadManifest

__all__ = [
    "ChunkRecord",
    "CrcMismatchError",
    "DEDICATED_PREFIX",
    "DisguiseKind",
    "DisguiseMode",
    "EmbedResult",
    "EmptyPayloadError",
    "KeyCollisionError",
    "MANIFEST_INDEX",
    "MIMIC_PREFIX",
    "ManifestCorruptError",
    "MissingChunkError",
    "NoManifestError",
    "PayloadManifest",
    "StashDataError",
    "chunk_key",
    "embed",
    "embedding_overhead",
    "extract",
    "manifest_key",
]
