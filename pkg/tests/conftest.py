"""Shared fixtures: seeded phantoms, small carriers, and the golden WDC file."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.checkpoint import Checkpoint, TensorEntry
from src.checkpoint.synthetic import synthetic_model
from src.volume import Volume, generate_phantom, normalize_minmax

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def golden_wdc_bytes() -> bytes:
    return (FIXTURES / "golden_two_entries.wdc").read_bytes()


@pytest.fixture
def golden_checkpoint() -> Checkpoint:
    return Checkpoint(
        entries=[
            TensorEntry.from_array("w", np.array([1.0, -2.0], dtype=np.float32)),
            TensorEntry.from_array("step", np.array(7, dtype=np.int64)),
        ]
    )


@pytest.fixture
def carrier() -> Checkpoint:
    return synthetic_model(seed=3)


@pytest.fixture
def small_phantom() -> tuple[Volume, Volume]:
    return generate_phantom(seed=11, dims=(8, 64, 64), n_ellipsoids=3)


@pytest.fixture
def pad_volume(small_phantom) -> Volume:
    volume, _ = small_phantom
    return normalize_minmax(volume)


@pytest.fixture(scope="module")
def high_phantom() -> Volume:
    volume, _ = generate_phantom(seed=5, dims=(3, 320, 288), n_ellipsoids=4)
    return volume
