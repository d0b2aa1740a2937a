"""ZIP path for volumes and masks, plus size/ratio accounting."""

from __future__ import annotations

import io
import struct
import zipfile
from typing import Optional

import numpy as np

from ..exceptions import UsageError
from ..volume import Volume, rvol_bytes
from ..utils import setup_logger
from .exceptions import ArchiveError

logger = setup_logger(__name__)

VOLUME_MEMBER = "volume.rvol"
MASK_MEMBER = "mask.bits"
MASK_MAGIC = b"MSK1"
MASK_HEADER = struct.Struct("<4sIII")
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)
_ARCHIVE_ERRORS = (zipfile.BadZipFile, zipfile.LargeZipFile, EOFError, OSError, ValueError, KeyError)


def _zip_single(member: str, data: bytes) -> bytes:
    info = zipfile.ZipInfo(member, date_time=_ZIP_EPOCH)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.create_system = 3
    info.external_attr = 0o644 << 16
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        archive.writestr(info, data, compresslevel=9)
    return buffer.getvalue()


def _unzip_single(archive_bytes: bytes, member: str) -> bytes:
    try:
        with zipfile.ZipFile(io.BytesIO(archive_bytes)) as archive:
            names = archive.namelist()
            if names != [member]:
                raise ArchiveError(f"ZIP 成员应为 [{member}]，实际 {names}")
            return archive.read(member)
    except _ARCHIVE_ERRORS as exc:
        raise ArchiveError(f"无法读取 ZIP: {exc}") from exc


def zip_volume(volume: Volume) -> bytes:
    """Single-member ZIP (DEFLATE level 9) of the RVOL serialization; deterministic."""
    raw = rvol_bytes(volume)
    archive = _zip_single(VOLUME_MEMBER, raw)
    logger.debug("ZIP 体数据: %s → %s 字节", len(raw), len(archive))
    return archive


def unzip_volume(archive: bytes) -> bytes:
    return _unzip_single(archive, VOLUME_MEMBER)


def zip_mask(mask: np.ndarray | Volume) -> bytes:
    """ZIP of a binary mask packed one bit per voxel (lossless path for annotations)."""
    voxels = mask.voxels if isinstance(mask, Volume) else np.asarray(mask)
    if voxels.ndim != 3:
        raise UsageError(f"mask 必须是三维数组，实际 ndim={voxels.ndim}")
    depth, height, width = voxels.shape
    packed = np.packbits(voxels.astype(bool).ravel(order="C"))
    return _zip_single(MASK_MEMBER, MASK_HEADER.pack(MASK_MAGIC, depth, height, width) + packed.tobytes())


def unzip_mask(archive: bytes) -> np.ndarray:
    data = _unzip_single(archive, MASK_MEMBER)
    if len(data) < MASK_HEADER.size:
        raise ArchiveError("mask 头部被截断")
    magic, depth, height, width = MASK_HEADER.unpack_from(data)
    if magic != MASK_MAGIC:
        raise ArchiveError(f"mask magic 错误: {magic!r}")
    count = depth * height * width
    bits = np.frombuffer(data, dtype=np.uint8, offset=MASK_HEADER.size)
    if bits.size != -(-count // 8):
        raise ArchiveError(f"mask 数据长度错误: {bits.size} 字节，需要 {count} 位")
    return np.unpackbits(bits, count=count).astype(bool).reshape(depth, height, width)


def bpp(byte_count: int, voxel_count: int) -> float:
    if voxel_count < 1:
        raise UsageError("voxel_count 必须 ≥ 1")
    return 8.0 * byte_count / voxel_count


def bpp_input(volume: Volume, origin_bytes: Optional[int] = None) -> float:
    """Bits per voxel of the source: its native depth, or the on-disk file size when given."""
    if origin_bytes is None:
        return float(volume.source_bits_per_voxel)
    return bpp(origin_bytes, volume.voxel_count)


def practical_ratio(lossy_bytes: int, zip_bytes: int) -> float:
    if zip_bytes < 1:
        raise UsageError("zip_bytes 必须 ≥ 1")
    return lossy_bytes / zip_bytes
