"""Overlap (Dice/VOE/RVD) and surface-distance (ASSD/MSD/RMSD) metrics on binary masks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ..volume import Volume
from .exceptions import DimensionMismatchError, EmptyMaskError, MetricsError

# 6-connectivity: faces only
_FACE_STRUCTURE = ndimage.generate_binary_structure(3, 1)


@dataclass(eq=False)
class MaskVolume:
    voxels: np.ndarray
    spacing: Tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        array = np.asarray(self.voxels)
        if array.ndim != 3:
            raise DimensionMismatchError(f"mask 必须是三维数组，实际 ndim={array.ndim}")
        if array.dtype != bool:
            if not np.isin(array, (0, 1)).all():
                raise MetricsError("mask 只能包含 0 和 1")
            array = array.astype(bool)
        self.voxels = array
        spacing = tuple(float(s) for s in self.spacing)
        if len(spacing) != 3 or any(not s > 0 for s in spacing):
            raise MetricsError(f"体素间距必须为三个正数: {self.spacing}")
        self.spacing = spacing  # type: ignore[assignment]

    @classmethod
    def from_volume(
        cls, volume: Volume, spacing: Tuple[float, float, float] = (1.0, 1.0, 1.0), threshold: float = 0.5
    ) -> "MaskVolume":
        return cls(voxels=volume.voxels >= threshold, spacing=spacing)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return tuple(int(n) for n in self.voxels.shape)  # type: ignore[return-value]

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.voxels))


def _check_pair(p: MaskVolume, g: MaskVolume, *, spacing: bool = False) -> None:
    if p.shape != g.shape:
        raise DimensionMismatchError(f"mask 尺寸不一致: {p.shape} vs {g.shape}")
    if spacing and p.spacing != g.spacing:
        raise DimensionMismatchError(f"体素间距不一致: {p.spacing} vs {g.spacing}")


def overlap_metrics(p: MaskVolume, g: MaskVolume) -> Tuple[float, float, float]:
    """(dice, voe, rvd); both empty → (1, 0, 0), only G empty → rvd = +inf."""
    _check_pair(p, g)
    size_p, size_g = p.count, g.count
    intersection = int(np.count_nonzero(p.voxels & g.voxels))
    union = size_p + size_g - intersection
    if union == 0:
        return 1.0, 0.0, 0.0
    dice = 2.0 * intersection / (size_p + size_g)
    voe = 1.0 - intersection / union
    rvd = math.inf if size_g == 0 else (size_p - size_g) / size_g
    return dice, voe, rvd


def surface_points(mask: MaskVolume) -> np.ndarray:
    """Voxel-centre coordinates (mm) of voxels with a 6-connected background neighbour."""
    if mask.count == 0:
        raise EmptyMaskError("mask 为空，没有表面")
    interior = ndimage.binary_erosion(mask.voxels, structure=_FACE_STRUCTURE, border_value=0)
    surface = mask.voxels & ~interior
    return np.argwhere(surface).astype(np.float64) * np.asarray(mask.spacing)


def surface_distances(p: MaskVolume, g: MaskVolume) -> np.ndarray:
    """Both directed surface-distance sets, concatenated."""
    _check_pair(p, g, spacing=True)
    surface_p = surface_points(p)
    surface_g = surface_points(g)
    p_to_g, _ = cKDTree(surface_g).query(surface_p)
    g_to_p, _ = cKDTree(surface_p).query(surface_g)
    return np.concatenate([p_to_g, g_to_p])


def surface_metrics(p: MaskVolume, g: MaskVolume) -> Tuple[float, float, float]:
    """(assd, msd, rmsd) in millimetres."""
    distances = surface_distances(p, g)
    return (
        float(distances.mean()),
        float(distances.max()),
        float(math.sqrt(np.mean(distances**2))),
    )
