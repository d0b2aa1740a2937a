"""8×8 block DCT, quantization schedule, zigzag ordering, and varint packing."""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn

from ..exceptions import UsageError
from .exceptions import CodecCorruptionError, CoefficientCountError

BLOCK = 8
COEFFS_PER_BLOCK = BLOCK * BLOCK
MIN_QUALITY = 1
MAX_QUALITY = 100
# u64 needs at most ten 7-bit groups
MAX_VARINT_BYTES = 10


def _zigzag_order() -> np.ndarray:
    def rank(flat: int) -> tuple[int, int]:
        row, col = divmod(flat, BLOCK)
        diagonal = row + col
        return diagonal, row if diagonal % 2 else -row

    return np.array(sorted(range(COEFFS_PER_BLOCK), key=rank), dtype=np.intp)


# ZIGZAG[k] is the row-major position of zigzag index k
ZIGZAG = _zigzag_order()


def check_quality(q: int) -> int:
    q = int(q)
    if not MIN_QUALITY <= q <= MAX_QUALITY:
        raise UsageError(f"质量参数 q 必须在 [{MIN_QUALITY},{MAX_QUALITY}] 内，当前 {q}")
    return q


def quant_steps(q: int) -> np.ndarray:
    """Δ(q, k) = (2·(101−q)/100)·(1 + k/8) for zigzag index k."""
    base = 2.0 * (101 - check_quality(q)) / 100.0
    return base * (1.0 + np.arange(COEFFS_PER_BLOCK, dtype=np.float64) / 8.0)


def forward_blocks(image: np.ndarray) -> np.ndarray:
    """(H, W) → (blocks, 64) orthonormal DCT-II coefficients in zigzag order."""
    rows, cols = image.shape
    tiles = image.reshape(rows // BLOCK, BLOCK, cols // BLOCK, BLOCK).transpose(0, 2, 1, 3)
    coeffs = dctn(tiles, axes=(2, 3), norm="ortho")
    return coeffs.reshape(-1, COEFFS_PER_BLOCK)[:, ZIGZAG]


def inverse_blocks(zigzagged: np.ndarray, rows: int, cols: int) -> np.ndarray:
    natural = np.empty_like(zigzagged)
    natural[:, ZIGZAG] = zigzagged
    tiles = natural.reshape(rows // BLOCK, cols // BLOCK, BLOCK, BLOCK)
    pixels = idctn(tiles, axes=(2, 3), norm="ortho")
    return pixels.transpose(0, 2, 1, 3).reshape(rows, cols)


def zigzag_encode_ints(values: np.ndarray) -> np.ndarray:
    """Signed → unsigned interleave: 0, −1, 1, −2 … → 0, 1, 2, 3 …"""
    signed = values.astype(np.int64)
    return ((signed << 1) ^ (signed >> 63)).astype(np.uint64)


def zigzag_decode_ints(values: np.ndarray) -> np.ndarray:
    unsigned = values.astype(np.uint64)
    return (unsigned >> np.uint64(1)).astype(np.int64) ^ -(unsigned & np.uint64(1)).astype(np.int64)


def varint_encode(values: np.ndarray) -> bytes:
    """LEB128 bytes for a 1-D array of unsigned integers."""
    values = np.asarray(values, dtype=np.uint64)
    if values.size == 0:
        return b""
    shifts = np.arange(MAX_VARINT_BYTES, dtype=np.uint64) * np.uint64(7)
    groups = ((values[:, None] >> shifts) & np.uint64(0x7F)).astype(np.uint8)

    lengths = np.ones(values.size, dtype=np.int64)
    for position in range(1, MAX_VARINT_BYTES):
        lengths[values >= (np.uint64(1) << np.uint64(7 * position))] = position + 1

    positions = np.arange(MAX_VARINT_BYTES)
    keep = positions[None, :] < lengths[:, None]
    more = positions[None, :] < (lengths[:, None] - 1)
    groups[more] |= 0x80
    return groups[keep].tobytes()


def varint_decode(data: bytes, expected: int) -> np.ndarray:
    """Decode exactly ``expected`` LEB128 integers filling ``data``."""
    raw = np.frombuffer(data, dtype=np.uint8)
    ends = np.flatnonzero((raw & 0x80) == 0)
    if raw.size and (ends.size == 0 or ends[-1] != raw.size - 1):
        raise CodecCorruptionError("varint 流在数值中途结束")
    if ends.size != expected:
        raise CoefficientCountError(f"系数数量错误: 期望 {expected}，实际 {ends.size}")
    if expected == 0:
        return np.zeros(0, dtype=np.uint64)

    starts = np.concatenate(([0], ends[:-1] + 1))
    lengths = ends - starts + 1
    if lengths.max() > MAX_VARINT_BYTES:
        raise CodecCorruptionError("varint 超过 10 字节")
    offsets = np.arange(raw.size) - np.repeat(starts, lengths)
    parts = (raw & 0x7F).astype(np.uint64) << (offsets.astype(np.uint64) * np.uint64(7))
    return np.add.reduceat(parts, starts)
