"""Whole-volume codes: tiling, per-slice encoding, and the VC01 file layout."""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from ..volume import (
    RangeMetadataError,
    TilingMode,
    TilingPlan,
    Volume,
    blend_patches,
    denormalize,
    plan_for_dims,
    plan_tiling,
    reassemble_planes,
    slice_stacks_at,
)
from ..volume.exceptions import VolumeError
from ..utils import setup_logger
from .exceptions import CodecFormatError
from .slice_codec import SliceCode, decode_slice, encode_slice
from .transform import check_quality

logger = setup_logger(__name__)

VOLUME_MAGIC = b"VC01"
VOLUME_VERSION = 1
VOLUME_HEADER = struct.Struct("<4sIIIIffBBI")
MAX_CODES = 1 << 24


@dataclass(eq=False)
class VolumeCode:
    """Image code of a whole volume: geometry, intensity range, and ordered SliceCodes."""

    dims: Tuple[int, int, int]
    intensity_min: float
    intensity_max: float
    mode: TilingMode
    q: int
    codes: List[SliceCode] = field(default_factory=list)

    @property
    def total_bytes(self) -> int:
        return VOLUME_HEADER.size + sum(code.byte_length for code in self.codes)

    @property
    def clamped(self) -> int:
        return sum(code.clamped for code in self.codes)

    def to_bytes(self) -> bytes:
        depth, height, width = self.dims
        header = VOLUME_HEADER.pack(
            VOLUME_MAGIC,
            VOLUME_VERSION,
            depth,
            height,
            width,
            self.intensity_min,
            self.intensity_max,
            self.mode.code,
            self.q,
            len(self.codes),
        )
        return header + b"".join(code.to_bytes() for code in self.codes)

    @classmethod
    def from_bytes(cls, data: bytes) -> "VolumeCode":
        if len(data) < VOLUME_HEADER.size:
            raise CodecFormatError("VolumeCode 头部被截断")
        magic, version, depth, height, width, lo, hi, mode_code, q, count = VOLUME_HEADER.unpack_from(
            data
        )
        if magic != VOLUME_MAGIC:
            raise CodecFormatError(f"VolumeCode magic 错误: {magic!r}")
        if version != VOLUME_VERSION:
            raise CodecFormatError(f"不支持的 VolumeCode 版本 {version}")
        try:
            mode = TilingMode.from_code(mode_code)
        except ValueError as exc:
            raise CodecFormatError(f"未知的 tiling 模式代码 {mode_code}") from exc
        if count > MAX_CODES:
            raise CodecFormatError(f"SliceCode 数量 {count} 超过上限")

        codes: List[SliceCode] = []
        offset = VOLUME_HEADER.size
        for _ in range(count):
            code, offset = SliceCode.read_from(data, offset)
            codes.append(code)
        if offset != len(data):
            raise CodecFormatError(f"VolumeCode 之后存在 {len(data) - offset} 字节多余数据")
        return cls(
            dims=(depth, height, width),
            intensity_min=lo,
            intensity_max=hi,
            mode=mode,
            q=q,
            codes=codes,
        )


def _encode_slice_patches(volume: Volume, plan: TilingPlan, index: int, q: int) -> List[SliceCode]:
    return [
        encode_slice(stack.center, q, mode=plan.mode, patch_index=stack.patch_index)
        for stack in slice_stacks_at(volume, plan, index)
    ]


def encode_volume(
    volume: Volume,
    mode: TilingMode | str | None = None,
    q: int = 75,
    *,
    threads: int = 1,
) -> VolumeCode:
    """Tile a normalized volume and encode every center-channel patch.

    Slices may be encoded in parallel; codes are always assembled in
    slice-major, patch-minor order.
    """
    if not volume.normalized:
        raise RangeMetadataError("encode_volume 需要归一化后的体数据")
    q = check_quality(q)
    plan = plan_tiling(volume, mode)

    indices = range(volume.depth)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_slice = list(pool.map(lambda z: _encode_slice_patches(volume, plan, z, q), indices))
    else:
        per_slice = [_encode_slice_patches(volume, plan, z, q) for z in indices]

    code = VolumeCode(
        dims=volume.shape,
        intensity_min=volume.intensity_min,
        intensity_max=volume.intensity_max,
        mode=plan.mode,
        q=q,
        codes=[c for codes in per_slice for c in codes],
    )
    if code.clamped:
        logger.warning("⚠️ 编码时共有 %s 个像素被截断到 [0,1]", code.clamped)
    logger.info(
        "🗜️ 体数据编码完成: dims=%s 模式=%s q=%s codes=%s 总大小=%s 字节",
        volume.shape,
        plan.mode.value,
        q,
        len(code.codes),
        code.total_bytes,
    )
    return code


def _check_codes(code: VolumeCode, patches_per_slice: int, expected: int) -> None:
    if len(code.codes) != expected:
        raise CodecFormatError(f"SliceCode 数量错误: 期望 {expected}，实际 {len(code.codes)}")
    for position, slice_code in enumerate(code.codes):
        if slice_code.mode is not code.mode:
            raise CodecFormatError(f"SliceCode {position} 模式与体数据不一致")
        if slice_code.patch_index != position % patches_per_slice:
            raise CodecFormatError(f"SliceCode {position} 的 patch 序号错误")


def _decode_slice_group(codes: Sequence[SliceCode], plan: TilingPlan) -> np.ndarray:
    return blend_patches([decode_slice(c) for c in codes], plan)


def decode_volume(code: VolumeCode, *, threads: int = 1) -> Volume:
    """Reassemble and denormalize; dims and intensity range come back exactly."""
    try:
        plan = plan_for_dims(
            code.dims,
            code.mode,
            intensity_min=code.intensity_min,
            intensity_max=code.intensity_max,
            degenerate=code.intensity_min == code.intensity_max,
        )
    except VolumeError as exc:
        raise CodecFormatError(f"VolumeCode 几何信息无效: {exc}") from exc

    per_slice = plan.patches_per_slice
    _check_codes(code, per_slice, plan.patch_count)
    groups = [code.codes[z * per_slice : (z + 1) * per_slice] for z in range(plan.depth)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            planes = list(pool.map(lambda g: _decode_slice_group(g, plan), groups))
    else:
        planes = [_decode_slice_group(g, plan) for g in groups]
    return denormalize(reassemble_planes(planes, plan))


def write_volume_code(code: VolumeCode, path: str | Path) -> int:
    data = code.to_bytes()
    Path(path).write_bytes(data)
    return len(data)


def read_volume_code(path: str | Path) -> VolumeCode:
    return VolumeCode.from_bytes(Path(path).read_bytes())
