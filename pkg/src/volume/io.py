"""RVOL and RAW+sidecar volume files."""

from __future__ import annotations

import json
import struct
from enum import Enum
from pathlib import Path

import numpy as np

from ..utils import setup_logger
from .exceptions import (
    BadMagicError,
    PayloadLengthError,
    SidecarError,
    TruncatedError,
    UnsupportedVersionError,
    VolumeShapeError,
)
from .models import Volume

logger = setup_logger(__name__)

RVOL_MAGIC = b"RVOL"
RVOL_VERSION = 1
# magic, version, depth, height, width, intensity_min, intensity_max, source_bits
_RVOL_HEADER = struct.Struct("<4sIIIIffI")
RVOL_HEADER_SIZE = _RVOL_HEADER.size

SIDECAR_FIELDS = (
    "depth",
    "height",
    "width",
    "intensity_min",
    "intensity_max",
    "source_bits_per_voxel",
)


class VolumeFormat(str, Enum):
    RVOL = "rvol"
    RAW = "raw"

    @classmethod
    def guess(cls, path: str | Path) -> "VolumeFormat":
        return cls.RAW if Path(path).suffix.lower() == ".raw" else cls.RVOL


def sidecar_path(path: str | Path) -> Path:
    raw = Path(path)
    return raw.with_name(raw.name + ".json")


def _check_payload(payload_len: int, depth: int, height: int, width: int) -> None:
    if min(depth, height, width) <= 0:
        raise VolumeShapeError(f"非法维度 {depth}×{height}×{width}")
    expected = depth * height * width * 4
    if payload_len < expected:
        raise TruncatedError(f"体素数据被截断: 需要 {expected} 字节，实际 {payload_len}")
    if payload_len > expected:
        raise PayloadLengthError(f"体素数据长度 {payload_len} 与维度声明的 {expected} 不一致")


def _voxels_from_bytes(payload: bytes, depth: int, height: int, width: int) -> np.ndarray:
    return np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(depth, height, width)


def rvol_bytes(volume: Volume) -> bytes:
    """Serialize a volume to RVOL bytes."""
    header = _RVOL_HEADER.pack(
        RVOL_MAGIC,
        RVOL_VERSION,
        volume.depth,
        volume.height,
        volume.width,
        volume.intensity_min,
        volume.intensity_max,
        volume.source_bits_per_voxel,
    )
    return header + volume.voxels.astype("<f4", copy=False).tobytes(order="C")


def parse_rvol(data: bytes) -> Volume:
    """Parse RVOL bytes; every malformed input raises a VolumeError subclass."""
    if len(data) < 4:
        raise TruncatedError("RVOL 头部不完整")
    if data[:4] != RVOL_MAGIC:
        raise BadMagicError(f"RVOL magic 错误: {data[:4]!r}")
    if len(data) < RVOL_HEADER_SIZE:
        raise TruncatedError(f"RVOL 头部需要 {RVOL_HEADER_SIZE} 字节，实际 {len(data)}")
    _, version, depth, height, width, lo, hi, bits = _RVOL_HEADER.unpack_from(data)
    if version != RVOL_VERSION:
        raise UnsupportedVersionError(f"不支持的 RVOL 版本 {version}")
    payload = data[RVOL_HEADER_SIZE:]
    _check_payload(len(payload), depth, height, width)
    return Volume(
        voxels=_voxels_from_bytes(payload, depth, height, width),
        intensity_min=lo,
        intensity_max=hi,
        source_bits_per_voxel=bits,
    )


def _load_sidecar(path: Path) -> dict:
    side = sidecar_path(path)
    try:
        meta = json.loads(side.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SidecarError(f"sidecar 不是合法 JSON: {side}: {exc}") from exc
    if not isinstance(meta, dict):
        raise SidecarError(f"sidecar 必须是 JSON 对象: {side}")
    missing = [name for name in SIDECAR_FIELDS if name not in meta]
    if missing:
        raise SidecarError(f"sidecar 缺少字段: {', '.join(missing)}")
    if meta.get("version", RVOL_VERSION) != RVOL_VERSION:
        raise UnsupportedVersionError(f"不支持的 sidecar 版本 {meta.get('version')}")
    try:
        return {
            "depth": int(meta["depth"]),
            "height": int(meta["height"]),
            "width": int(meta["width"]),
            "intensity_min": float(meta["intensity_min"]),
            "intensity_max": float(meta["intensity_max"]),
            "source_bits_per_voxel": int(meta["source_bits_per_voxel"]),
        }
    except (TypeError, ValueError) as exc:
        raise SidecarError(f"sidecar 字段类型错误: {exc}") from exc


def load_volume(path: str | Path, fmt: VolumeFormat | str | None = None) -> Volume:
    """Read an RVOL file, or a raw f32 payload with its ``<name>.json`` sidecar."""
    path = Path(path)
    fmt = VolumeFormat(fmt) if fmt is not None else VolumeFormat.guess(path)
    if fmt is VolumeFormat.RVOL:
        volume = parse_rvol(path.read_bytes())
    else:
        meta = _load_sidecar(path)
        payload = path.read_bytes()
        _check_payload(len(payload), meta["depth"], meta["height"], meta["width"])
        volume = Volume(
            voxels=_voxels_from_bytes(payload, meta["depth"], meta["height"], meta["width"]),
            intensity_min=meta["intensity_min"],
            intensity_max=meta["intensity_max"],
            source_bits_per_voxel=meta["source_bits_per_voxel"],
        )
    logger.debug("📥 已加载体数据 %s shape=%s", path, volume.shape)
    return volume


def save_volume(volume: Volume, path: str | Path, fmt: VolumeFormat | str | None = None) -> int:
    """Write a volume; returns bytes written (payload plus header or sidecar)."""
    path = Path(path)
    fmt = VolumeFormat(fmt) if fmt is not None else VolumeFormat.guess(path)
    if fmt is VolumeFormat.RVOL:
        data = rvol_bytes(volume)
        path.write_bytes(data)
        return len(data)

    payload = volume.voxels.astype("<f4", copy=False).tobytes(order="C")
    meta = {
        "version": RVOL_VERSION,
        "depth": volume.depth,
        "height": volume.height,
        "width": volume.width,
        "intensity_min": volume.intensity_min,
        "intensity_max": volume.intensity_max,
        "source_bits_per_voxel": volume.source_bits_per_voxel,
    }
    sidecar = json.dumps(meta, indent=2, sort_keys=True)
    path.write_bytes(payload)
    sidecar_path(path).write_text(sidecar, encoding="utf-8")
    return len(payload) + len(sidecar.encode("utf-8"))
