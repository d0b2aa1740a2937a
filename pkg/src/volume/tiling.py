"""Intensity normalization and Low/High/Pad slice tiling with blended reassembly."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ..utils import setup_logger
from .exceptions import (
    MissingPatchError,
    PlanMismatchError,
    RangeMetadataError,
    UnsupportedGeometryError,
    VolumeShapeError,
)
from .models import PATCH_SIZE, PATCH_STRIDE, SliceStack, TilingMode, TilingPlan, Volume

logger = setup_logger(__name__)

LOW_SOURCE_SIZE = 2 * PATCH_SIZE


def normalize_minmax(volume: Volume) -> Volume:
    """Map voxels to [0, 1] with the volume's own extremes, keeping them as the range."""
    data = volume.voxels
    lo = float(data.min())
    hi = float(data.max())
    if hi == lo:
        logger.warning("⚠️ 体数据强度恒定 (%s)，归一化结果全为 0", lo)
        return Volume(
            voxels=np.zeros_like(data),
            intensity_min=lo,
            intensity_max=hi,
            source_bits_per_voxel=volume.source_bits_per_voxel,
            normalized=True,
            degenerate=True,
        )
    scaled = (data.astype(np.float64) - lo) / (hi - lo)
    return Volume(
        voxels=np.clip(scaled, 0.0, 1.0).astype(np.float32),
        intensity_min=lo,
        intensity_max=hi,
        source_bits_per_voxel=volume.source_bits_per_voxel,
        normalized=True,
        degenerate=False,
    )


def denormalize(volume: Volume) -> Volume:
    """Inverse of normalize_minmax."""
    if not volume.normalized:
        raise RangeMetadataError("体数据没有归一化范围信息，无法反归一化")
    lo, hi = volume.intensity_min, volume.intensity_max
    restored = volume.voxels.astype(np.float64) * (hi - lo) + lo
    return Volume(
        voxels=restored.astype(np.float32),
        intensity_min=lo,
        intensity_max=hi,
        source_bits_per_voxel=volume.source_bits_per_voxel,
    )


def default_mode(height: int, width: int) -> TilingMode:
    if height <= PATCH_SIZE and width <= PATCH_SIZE:
        return TilingMode.PAD
    return TilingMode.HIGH


def _axis_starts(length: int) -> List[int]:
    """Patch starts at stride 128, the last one clamped to the slice edge."""
    last = length - PATCH_SIZE
    starts = list(range(0, last + 1, PATCH_STRIDE))
    if starts[-1] != last:
        starts.append(last)
    return starts


def _axis_profiles(starts: Sequence[int], length: int) -> List[np.ndarray]:
    t = np.arange(PATCH_SIZE, dtype=np.float64) + 0.5
    tent = np.minimum(t, PATCH_SIZE - t)
    half = PATCH_SIZE // 2
    profiles = []
    for start in starts:
        profile = tent.copy()
        # no neighbour to hand off to at the slice border
        if start == 0:
            profile[:half] = tent.max()
        if start + PATCH_SIZE == length:
            profile[half:] = tent.max()
        profiles.append(profile)
    return profiles


def _high_weights(
    row_starts: Sequence[int], col_starts: Sequence[int], height: int, width: int
) -> List[np.ndarray]:
    row_profiles = _axis_profiles(row_starts, height)
    col_profiles = _axis_profiles(col_starts, width)
    row_total = np.zeros(height)
    col_total = np.zeros(width)
    for start, profile in zip(row_starts, row_profiles):
        row_total[start : start + PATCH_SIZE] += profile
    for start, profile in zip(col_starts, col_profiles):
        col_total[start : start + PATCH_SIZE] += profile

    weights = []
    for r_start, r_profile in zip(row_starts, row_profiles):
        rows = r_profile / row_total[r_start : r_start + PATCH_SIZE]
        for c_start, c_profile in zip(col_starts, col_profiles):
            cols = c_profile / col_total[c_start : c_start + PATCH_SIZE]
            weights.append(np.outer(rows, cols))
    return weights


def plan_tiling(volume: Volume, mode: TilingMode | str | None = None) -> TilingPlan:
    """Build the tiling plan for a volume's in-plane geometry."""
    return plan_for_dims(
        volume.shape,
        mode,
        intensity_min=volume.intensity_min,
        intensity_max=volume.intensity_max,
        degenerate=volume.degenerate,
    )


def plan_for_dims(
    dims: Tuple[int, int, int],
    mode: TilingMode | str | None = None,
    *,
    intensity_min: float = 0.0,
    intensity_max: float = 1.0,
    degenerate: bool = False,
) -> TilingPlan:
    """Same as plan_tiling, from bare dimensions (used when decoding codes)."""
    depth, height, width = (int(n) for n in dims)
    if min(depth, height, width) < 1:
        raise VolumeShapeError(f"体数据尺寸必须为正: {dims}")
    mode = TilingMode.parse(mode) if mode is not None else default_mode(height, width)

    if mode is TilingMode.LOW:
        if (height, width) != (LOW_SOURCE_SIZE, LOW_SOURCE_SIZE):
            raise UnsupportedGeometryError(f"Low 模式需要 512×512 切片，实际 {height}×{width}")
        positions = [(0, 0)]
        weights = [np.ones((PATCH_SIZE, PATCH_SIZE))]
    elif mode is TilingMode.HIGH:
        if height < PATCH_SIZE or width < PATCH_SIZE:
            raise UnsupportedGeometryError(f"High 模式需要切片至少 256×256，实际 {height}×{width}")
        row_starts = _axis_starts(height)
        col_starts = _axis_starts(width)
        positions = [(r, c) for r in row_starts for c in col_starts]
        weights = _high_weights(row_starts, col_starts, height, width)
    else:
        if height > PATCH_SIZE or width > PATCH_SIZE:
            raise UnsupportedGeometryError(f"Pad 模式需要切片不大于 256×256，实际 {height}×{width}")
        positions = [((PATCH_SIZE - height) // 2, (PATCH_SIZE - width) // 2)]
        weights = [np.ones((PATCH_SIZE, PATCH_SIZE))]

    return TilingPlan(
        mode=mode,
        depth=depth,
        height=height,
        width=width,
        positions=positions,
        intensity_min=intensity_min,
        intensity_max=intensity_max,
        degenerate=degenerate,
        weights=weights,
    )


def _downsample_half(image: np.ndarray) -> np.ndarray:
    # bilinear at factor 2 with pixel-centre sampling is the 2×2 mean
    rows, cols = image.shape
    return image.reshape(rows // 2, 2, cols // 2, 2).mean(axis=(1, 3))


def _upsample_double(image: np.ndarray) -> np.ndarray:
    return ndimage.zoom(image, 2, order=1, mode="nearest", grid_mode=True)


def _tile_plane(plane: np.ndarray, plan: TilingPlan, patch_index: int) -> np.ndarray:
    if plan.mode is TilingMode.LOW:
        return _downsample_half(plane.astype(np.float64))
    if plan.mode is TilingMode.HIGH:
        row, col = plan.positions[patch_index]
        return plane[row : row + PATCH_SIZE, col : col + PATCH_SIZE]
    top, left = plan.positions[0]
    bottom = PATCH_SIZE - plan.height - top
    right = PATCH_SIZE - plan.width - left
    return np.pad(plane, ((top, bottom), (left, right)), mode="edge")


def slice_stacks_at(volume: Volume, plan: TilingPlan, index: int) -> List[SliceStack]:
    """All stacks (one per patch) centred on slice ``index``."""
    last = volume.depth - 1
    neighbours = (max(index - 1, 0), index, min(index + 1, last))
    planes = [volume.voxels[z] for z in neighbours]
    stacks = []
    for patch_index, origin in enumerate(plan.positions):
        channels = np.stack([_tile_plane(p, plan, patch_index) for p in planes], axis=-1)
        stacks.append(
            SliceStack(
                channels=channels.astype(np.float32),
                center_slice_index=index,
                mode=plan.mode,
                patch_index=patch_index,
                patch_origin=origin,
            )
        )
    return stacks


def make_slice_stacks(volume: Volume, mode: TilingMode | str | None = None) -> List[SliceStack]:
    """Three-channel encoder inputs for every slice of a normalized volume."""
    if not volume.normalized:
        raise RangeMetadataError("make_slice_stacks 需要先执行 normalize_minmax")
    plan = plan_tiling(volume, mode)
    stacks: List[SliceStack] = []
    for index in range(volume.depth):
        stacks.extend(slice_stacks_at(volume, plan, index))
    return stacks


def blend_patches(patches: Sequence[np.ndarray], plan: TilingPlan) -> np.ndarray:
    """Rebuild one slice from its center-channel patches."""
    if len(patches) != plan.patches_per_slice:
        raise PlanMismatchError(f"需要 {plan.patches_per_slice} 个 patch，实际 {len(patches)}")
    for patch in patches:
        if np.shape(patch) != (PATCH_SIZE, PATCH_SIZE):
            raise PlanMismatchError(f"patch 尺寸错误: {np.shape(patch)}")

    if plan.mode is TilingMode.LOW:
        return _upsample_double(np.asarray(patches[0], dtype=np.float64))
    if plan.mode is TilingMode.PAD:
        top, left = plan.positions[0]
        return np.asarray(patches[0], dtype=np.float64)[top : top + plan.height, left : left + plan.width]

    canvas = np.zeros((plan.height, plan.width), dtype=np.float64)
    for (row, col), weight, patch in zip(plan.positions, plan.weights, patches):
        canvas[row : row + PATCH_SIZE, col : col + PATCH_SIZE] += weight * patch
    return canvas


def reassemble_planes(planes: Iterable[np.ndarray], plan: TilingPlan) -> Volume:
    """Stack reconstructed slices into a normalized volume carrying the plan's range."""
    voxels = np.stack(list(planes), axis=0)
    if voxels.shape != (plan.depth, plan.height, plan.width):
        raise PlanMismatchError(f"重建体数据 shape {voxels.shape} 与计划不符")
    return Volume(
        voxels=voxels.astype(np.float32),
        intensity_min=plan.intensity_min,
        intensity_max=plan.intensity_max,
        normalized=True,
        degenerate=plan.degenerate,
    )


def reassemble_slices(stacks: Sequence[SliceStack], plan: TilingPlan) -> Volume:
    """Inverse of make_slice_stacks; only each stack's center channel contributes."""
    by_position: Dict[Tuple[int, int], SliceStack] = {}
    for stack in stacks:
        if stack.mode is not plan.mode:
            raise PlanMismatchError(f"stack 模式 {stack.mode.value} 与计划 {plan.mode.value} 不一致")
        if not (0 <= stack.center_slice_index < plan.depth) or not (
            0 <= stack.patch_index < plan.patches_per_slice
        ):
            raise PlanMismatchError(
                f"stack 位置越界: slice={stack.center_slice_index} patch={stack.patch_index}"
            )
        key = (stack.center_slice_index, stack.patch_index)
        if key in by_position:
            raise PlanMismatchError(f"重复的 stack: slice={key[0]} patch={key[1]}")
        by_position[key] = stack

    planes = []
    for index in range(plan.depth):
        patches: List[Optional[np.ndarray]] = []
        for patch_index in range(plan.patches_per_slice):
            stack = by_position.get((index, patch_index))
            if stack is None:
                raise MissingPatchError(f"缺少 patch: slice={index} patch={patch_index}")
            patches.append(stack.center)
        planes.append(blend_patches(patches, plan))
    return reassemble_planes(planes, plan)
