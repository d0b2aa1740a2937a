"""Typed structures for volumes, slice stacks, and tiling plans."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np

from .exceptions import RangeMetadataError, VolumeShapeError

PATCH_SIZE = 256
PATCH_STRIDE = 128


class TilingMode(str, Enum):
    """Slice sampling strategy feeding the 256×256 encoder input."""

    LOW = "low"
    HIGH = "high"
    PAD = "pad"

    @property
    def code(self) -> int:
        return _MODE_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "TilingMode":
        for mode, value in _MODE_CODES.items():
            if value == code:
                return mode
        raise ValueError(f"unknown tiling mode code {code}")

    @classmethod
    def parse(cls, value: "str | TilingMode") -> "TilingMode":
        if isinstance(value, TilingMode):
            return value
        return cls(str(value).strip().lower())


_MODE_CODES = {TilingMode.LOW: 0, TilingMode.HIGH: 1, TilingMode.PAD: 2}


def _as_f32(value: float) -> float:
    return float(np.float32(value))


@dataclass(eq=False)
class Volume:
    """3-D scalar image (depth, height, width) with its physical intensity range."""

    voxels: np.ndarray
    intensity_min: float
    intensity_max: float
    source_bits_per_voxel: int = 32
    normalized: bool = False
    degenerate: bool = False

    def __post_init__(self) -> None:
        array = np.asarray(self.voxels)
        if array.ndim != 3 or min(array.shape) <= 0:
            raise VolumeShapeError(f"体数据必须是非空三维数组，实际 shape={array.shape}")
        self.voxels = np.ascontiguousarray(array, dtype=np.float32)
        # header fields are f32 on disk; keep them representable so round trips are exact
        self.intensity_min = _as_f32(self.intensity_min)
        self.intensity_max = _as_f32(self.intensity_max)
        if math.isnan(self.intensity_min) or math.isnan(self.intensity_max):
            raise RangeMetadataError("强度范围包含 NaN")
        if self.intensity_min > self.intensity_max:
            raise RangeMetadataError(
                f"intensity_min {self.intensity_min} > intensity_max {self.intensity_max}"
            )
        if int(self.source_bits_per_voxel) < 1:
            raise VolumeShapeError("source_bits_per_voxel 必须为正整数")
        self.source_bits_per_voxel = int(self.source_bits_per_voxel)

    @classmethod
    def from_array(cls, voxels: np.ndarray, source_bits_per_voxel: int = 32) -> "Volume":
        """Wrap an array, taking the intensity range from its data."""
        array = np.asarray(voxels, dtype=np.float32)
        if array.size == 0:
            raise VolumeShapeError("体数据为空")
        return cls(
            voxels=array,
            intensity_min=float(array.min()),
            intensity_max=float(array.max()),
            source_bits_per_voxel=source_bits_per_voxel,
        )

    @property
    def shape(self) -> Tuple[int, int, int]:
        depth, height, width = self.voxels.shape
        return int(depth), int(height), int(width)

    @property
    def depth(self) -> int:
        return self.shape[0]

    @property
    def height(self) -> int:
        return self.shape[1]

    @property
    def width(self) -> int:
        return self.shape[2]

    @property
    def voxel_count(self) -> int:
        return int(self.voxels.size)

    def replace(self, **changes) -> "Volume":
        return dataclasses.replace(self, **changes)


@dataclass(eq=False)
class SliceStack:
    """256×256×3 encoder input: a slice (channel 1) between its neighbours."""

    channels: np.ndarray
    center_slice_index: int
    mode: TilingMode
    patch_index: int
    patch_origin: Tuple[int, int]

    @property
    def center(self) -> np.ndarray:
        return self.channels[:, :, 1]


@dataclass(eq=False)
class TilingPlan:
    """How each slice of a volume maps onto 256×256 patches and back.

    ``positions`` holds the (row, col) of each patch in the source slice for
    HIGH; for PAD it holds the (top, left) offset of the slice inside the
    padded patch; LOW has the single position (0, 0).
    """

    mode: TilingMode
    depth: int
    height: int
    width: int
    positions: List[Tuple[int, int]]
    intensity_min: float
    intensity_max: float
    degenerate: bool = False
    weights: List[np.ndarray] = field(default_factory=list)

    @property
    def patches_per_slice(self) -> int:
        return len(self.positions)

    @property
    def patch_count(self) -> int:
        return self.depth * self.patches_per_slice
