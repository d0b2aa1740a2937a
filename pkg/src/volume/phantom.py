"""Seeded synthetic CT-like phantoms with ellipsoid lesions and their masks."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from ..exceptions import UsageError
from ..utils import setup_logger
from .models import Volume

logger = setup_logger(__name__)

MIN_PHANTOM_DIM = 8
# Hounsfield-like mapping of the unit field: air at -1000, dense tissue near +400
HU_OFFSET = -1000.0
HU_SCALE = 1400.0
PHANTOM_SOURCE_BITS = 16
# soft edge width in normalized radius units
EDGE_WIDTH = 0.1


def generate_phantom(
    seed: int,
    dims: Tuple[int, int, int],
    n_ellipsoids: int,
) -> Tuple[Volume, Volume]:
    """Return (phantom, mask); a pure function of its arguments.

    The phantom is a smooth linear background ramp plus ``n_ellipsoids``
    soft-edged ellipsoids with random centre, semi-axes, and intensity. The
    mask is the union of the ellipsoid interiors (normalized radius < 1).
    """
    if len(dims) != 3 or any(int(n) < MIN_PHANTOM_DIM for n in dims):
        raise UsageError(f"phantom 维度每个轴必须 ≥ {MIN_PHANTOM_DIM}，实际 {tuple(dims)}")
    if n_ellipsoids < 0:
        raise UsageError("n_ellipsoids 不能为负数")

    depth, height, width = (int(n) for n in dims)
    rng = np.random.default_rng(seed)

    zz = np.linspace(-1.0, 1.0, depth, dtype=np.float32)[:, None, None]
    yy = np.linspace(-1.0, 1.0, height, dtype=np.float32)[None, :, None]
    xx = np.linspace(-1.0, 1.0, width, dtype=np.float32)[None, None, :]

    base, slope_z, slope_y, slope_x = rng.uniform(
        low=(0.25, -0.05, -0.08, -0.08), high=(0.35, 0.05, 0.08, 0.08)
    )
    field = np.empty((depth, height, width), dtype=np.float32)
    field[...] = base + slope_z * zz + slope_y * yy + slope_x * xx
    mask = np.zeros((depth, height, width), dtype=bool)

    for _ in range(n_ellipsoids):
        center = rng.uniform(-0.6, 0.6, size=3).astype(np.float32)
        axes = rng.uniform(0.15, 0.45, size=3).astype(np.float32)
        intensity = np.float32(rng.uniform(0.2, 0.5))
        radius = np.sqrt(
            ((zz - center[0]) / axes[0]) ** 2
            + ((yy - center[1]) / axes[1]) ** 2
            + ((xx - center[2]) / axes[2]) ** 2
        )
        edge = np.clip((radius - 1.0) / np.float32(EDGE_WIDTH), -30.0, 30.0)
        field += intensity / (np.float32(1.0) + np.exp(edge))
        mask |= radius < 1.0

    voxels = (field * np.float32(HU_SCALE) + np.float32(HU_OFFSET)).astype(np.float32)
    phantom = Volume.from_array(voxels, source_bits_per_voxel=PHANTOM_SOURCE_BITS)
    mask_volume = Volume.from_array(mask.astype(np.float32), source_bits_per_voxel=8)
    logger.debug(
        "🧪 phantom seed=%s dims=%s ellipsoids=%s mask_voxels=%s",
        seed,
        (depth, height, width),
        n_ellipsoids,
        int(mask.sum()),
    )
    return phantom, mask_volume
