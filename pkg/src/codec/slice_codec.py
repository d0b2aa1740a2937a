"""Encode and decode single 256×256 patches as self-describing SliceCodes.

SliceCode bytes (little-endian): ``"SC01"``, u8 mode, u8 q, u16 patch_index,
u32 deflate_len, then the raw DEFLATE payload. The payload inflates to one
varint per quantized coefficient, plane-major (coefficient k of every block,
then k+1), each mapped signed → unsigned before packing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..volume import PATCH_SIZE, TilingMode
from ..utils import setup_logger
from .deflate import deflate_raw, inflate_raw
from .exceptions import CodecFormatError
from .transform import (
    COEFFS_PER_BLOCK,
    MAX_VARINT_BYTES,
    check_quality,
    forward_blocks,
    inverse_blocks,
    quant_steps,
    varint_decode,
    varint_encode,
    zigzag_decode_ints,
    zigzag_encode_ints,
)

logger = setup_logger(__name__)

SLICE_MAGIC = b"SC01"
SLICE_HEADER = struct.Struct("<4sBBHI")
BLOCKS_PER_PATCH = (PATCH_SIZE // 8) ** 2
COEFFS_PER_PATCH = BLOCKS_PER_PATCH * COEFFS_PER_BLOCK


@dataclass(frozen=True)
class SliceCode:
    mode: TilingMode
    q: int
    patch_index: int
    payload: bytes
    clamped: int = field(default=0, compare=False)

    def to_bytes(self) -> bytes:
        header = SLICE_HEADER.pack(
            SLICE_MAGIC, self.mode.code, self.q, self.patch_index, len(self.payload)
        )
        return header + self.payload

    @property
    def byte_length(self) -> int:
        return SLICE_HEADER.size + len(self.payload)

    @classmethod
    def read_from(cls, data: bytes, offset: int = 0) -> tuple["SliceCode", int]:
        """Parse one code starting at ``offset``; returns it and the next offset."""
        if len(data) - offset < SLICE_HEADER.size:
            raise CodecFormatError("SliceCode 头部被截断")
        magic, mode_code, q, patch_index, length = SLICE_HEADER.unpack_from(data, offset)
        if magic != SLICE_MAGIC:
            raise CodecFormatError(f"SliceCode magic 错误: {magic!r}")
        try:
            mode = TilingMode.from_code(mode_code)
        except ValueError as exc:
            raise CodecFormatError(f"未知的 tiling 模式代码 {mode_code}") from exc
        if not 1 <= q <= 100:
            raise CodecFormatError(f"SliceCode 质量参数越界: {q}")
        start = offset + SLICE_HEADER.size
        end = start + length
        if end > len(data):
            raise CodecFormatError("SliceCode 数据被截断")
        return cls(mode=mode, q=q, patch_index=patch_index, payload=bytes(data[start:end])), end

    @classmethod
    def from_bytes(cls, data: bytes) -> "SliceCode":
        code, end = cls.read_from(data)
        if end != len(data):
            raise CodecFormatError(f"SliceCode 之后存在 {len(data) - end} 字节多余数据")
        return code


def encode_slice(
    patch: np.ndarray,
    q: int,
    *,
    mode: TilingMode = TilingMode.PAD,
    patch_index: int = 0,
) -> SliceCode:
    """Transform-code one 256×256 patch with values in [0, 1]."""
    q = check_quality(q)
    image = np.asarray(patch, dtype=np.float64)
    if image.shape != (PATCH_SIZE, PATCH_SIZE):
        raise CodecFormatError(f"patch 必须是 {PATCH_SIZE}×{PATCH_SIZE}，实际 {image.shape}")

    outside = int(np.count_nonzero(~((image >= 0.0) & (image <= 1.0))))
    if outside:
        logger.warning("⚠️ patch %s 有 %s 个像素超出 [0,1]，已截断", patch_index, outside)
        image = np.clip(np.nan_to_num(image, nan=0.0), 0.0, 1.0)

    coeffs = forward_blocks(image)
    indices = np.rint(coeffs / quant_steps(q)).astype(np.int64)
    planes = indices.T.ravel()
    payload = deflate_raw(varint_encode(zigzag_encode_ints(planes)))
    return SliceCode(
        mode=TilingMode.parse(mode), q=q, patch_index=patch_index, payload=payload, clamped=outside
    )


def decode_slice(code: SliceCode) -> np.ndarray:
    """Dequantize and inverse-transform; output is clamped to [0, 1]."""
    raw = inflate_raw(code.payload, COEFFS_PER_PATCH * MAX_VARINT_BYTES)
    indices = zigzag_decode_ints(varint_decode(raw, COEFFS_PER_PATCH))
    coeffs = indices.reshape(COEFFS_PER_BLOCK, BLOCKS_PER_PATCH).T * quant_steps(code.q)
    pixels = inverse_blocks(coeffs, PATCH_SIZE, PATCH_SIZE)
    return np.clip(pixels, 0.0, 1.0)
