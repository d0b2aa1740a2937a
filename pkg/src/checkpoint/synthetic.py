"""Seeded stand-in utility models: plain weight checkpoints used as attack carriers."""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from .models import Checkpoint, TensorEntry

# small segmentation-head layout (utility branch)
UTILITY_BRANCH_LAYERS: List[Tuple[str, Tuple[int, ...]]] = [
    ("branch.conv1.weight", (32, 64, 3, 3)),
    ("branch.conv1.bias", (32,)),
    ("branch.conv2.weight", (32, 32, 3, 3)),
    ("branch.conv2.bias", (32,)),
    ("branch.head.weight", (2, 32, 1, 1)),
    ("branch.head.bias", (2,)),
]
MAX_FLAT_LAYER = 1 << 18


def _draw(rng: np.random.Generator, count: int, distribution: str, scale: float) -> np.ndarray:
    if distribution == "uniform":
        return rng.uniform(-scale, scale, size=count).astype(np.float32)
    return (rng.standard_normal(count, dtype=np.float32) * np.float32(scale)).astype(np.float32)


def layers_for_bytes(total_bytes: int) -> List[Tuple[str, Tuple[int, ...]]]:
    """Flat F32 layers whose payloads add up to ``total_bytes`` (rounded down to 4)."""
    remaining = max(total_bytes // 4, 1)
    layers = []
    index = 0
    while remaining:
        count = min(remaining, MAX_FLAT_LAYER)
        layers.append((f"backbone.block{index}.weight", (count,)))
        remaining -= count
        index += 1
    return layers


def synthetic_model(
    seed: int,
    layers: Sequence[Tuple[str, Tuple[int, ...]]] | None = None,
    *,
    distribution: str = "gaussian",
    scale: float = 0.05,
) -> Checkpoint:
    """Gaussian (or uniform) F32 weights for each (key, shape) layer."""
    rng = np.random.default_rng(seed)
    checkpoint = Checkpoint()
    for key, shape in layers or UTILITY_BRANCH_LAYERS:
        count = int(np.prod(shape)) if shape else 1
        values = _draw(rng, count, distribution, scale).reshape(shape)
        checkpoint.add_entry(TensorEntry.from_array(key, values))
    return checkpoint
