from __future__ import annotations

import json
import struct

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.exceptions import UsageError
from src.volume import (
    PATCH_SIZE,
    BadMagicError,
    MissingPatchError,
    PayloadLengthError,
    PlanMismatchError,
    RangeMetadataError,
    SidecarError,
    TilingMode,
    TruncatedError,
    UnsupportedGeometryError,
    UnsupportedVersionError,
    Volume,
    VolumeShapeError,
    denormalize,
    generate_phantom,
    load_volume,
    make_slice_stacks,
    normalize_minmax,
    parse_rvol,
    plan_for_dims,
    plan_tiling,
    reassemble_slices,
    rvol_bytes,
    save_volume,
)


def _ramp(depth: int, height: int, width: int) -> Volume:
    voxels = np.arange(depth * height * width, dtype=np.float32).reshape(depth, height, width)
    return Volume.from_array(voxels)


class TestVolumeModel:
    def test_from_array_takes_range_from_data(self):
        volume = _ramp(2, 3, 4)
        assert volume.shape == (2, 3, 4)
        assert volume.intensity_min == 0.0
        assert volume.intensity_max == 23.0
        assert volume.voxel_count == 24

    @pytest.mark.parametrize("shape", [(0, 4, 4), (4, 4), (1, 2, 3, 4)])
    def test_rejects_bad_shapes(self, shape):
        with pytest.raises(VolumeShapeError):
            Volume(voxels=np.zeros(shape, dtype=np.float32), intensity_min=0, intensity_max=1)

    def test_rejects_inverted_range(self):
        with pytest.raises(RangeMetadataError):
            Volume(voxels=np.zeros((1, 1, 1)), intensity_min=2.0, intensity_max=1.0)


class TestRvol:
    def test_file_round_trip_is_bit_exact(self, tmp_path, small_phantom):
        volume, _ = small_phantom
        path = tmp_path / "vol.rvol"
        written = save_volume(volume, path)
        assert written == path.stat().st_size == 32 + volume.voxel_count * 4

        loaded = load_volume(path)
        assert loaded.shape == volume.shape
        assert loaded.intensity_min == volume.intensity_min
        assert loaded.intensity_max == volume.intensity_max
        assert loaded.source_bits_per_voxel == volume.source_bits_per_voxel
        npt.assert_array_equal(loaded.voxels, volume.voxels)

    def test_raw_with_sidecar(self, tmp_path):
        volume = _ramp(2, 8, 8)
        path = tmp_path / "vol.raw"
        save_volume(volume, path)
        sidecar = json.loads((tmp_path / "vol.raw.json").read_text(encoding="utf-8"))
        assert sidecar["depth"] == 2 and sidecar["width"] == 8

        loaded = load_volume(path)
        npt.assert_array_equal(loaded.voxels, volume.voxels)

    def test_raw_missing_sidecar_field(self, tmp_path):
        volume = _ramp(1, 2, 2)
        path = tmp_path / "v.raw"
        save_volume(volume, path)
        side = tmp_path / "v.raw.json"
        meta = json.loads(side.read_text(encoding="utf-8"))
        del meta["intensity_max"]
        side.write_text(json.dumps(meta), encoding="utf-8")
        with pytest.raises(SidecarError):
            load_volume(path)

    def test_bad_magic(self):
        data = bytearray(rvol_bytes(_ramp(1, 2, 2)))
        data[:4] = b"XVOL"
        with pytest.raises(BadMagicError):
            parse_rvol(bytes(data))

    def test_unsupported_version(self):
        data = bytearray(rvol_bytes(_ramp(1, 2, 2)))
        data[4:8] = struct.pack("<I", 2)
        with pytest.raises(UnsupportedVersionError):
            parse_rvol(bytes(data))

    def test_truncated_payload(self):
        data = rvol_bytes(_ramp(1, 2, 2))
        with pytest.raises(TruncatedError):
            parse_rvol(data[:-1])
        with pytest.raises(TruncatedError):
            parse_rvol(data[:10])

    def test_overlong_payload(self):
        with pytest.raises(PayloadLengthError):
            parse_rvol(rvol_bytes(_ramp(1, 2, 2)) + b"\x00" * 4)


class TestNormalize:
    def test_round_trip(self):
        volume = Volume.from_array(np.linspace(-1000, 400, 2 * 4 * 4, dtype=np.float32).reshape(2, 4, 4))
        normalized = normalize_minmax(volume)
        assert normalized.normalized
        assert float(normalized.voxels.min()) == 0.0
        assert float(normalized.voxels.max()) == 1.0
        npt.assert_allclose(denormalize(normalized).voxels, volume.voxels, atol=1e-3)

    def test_constant_volume_is_degenerate(self):
        volume = Volume.from_array(np.full((2, 3, 3), 5.0, dtype=np.float32))
        normalized = normalize_minmax(volume)
        assert normalized.degenerate
        npt.assert_array_equal(normalized.voxels, 0.0)
        npt.assert_array_equal(denormalize(normalized).voxels, 5.0)

    def test_denormalize_requires_range(self):
        with pytest.raises(RangeMetadataError):
            denormalize(_ramp(1, 2, 2))


class TestTilingPlan:
    def test_small_slices_default_to_pad(self):
        plan = plan_for_dims((4, 64, 100))
        assert plan.mode is TilingMode.PAD
        assert plan.positions == [((PATCH_SIZE - 64) // 2, (PATCH_SIZE - 100) // 2)]
        assert plan.patch_count == 4

    def test_high_positions_clamp_last_patch(self):
        plan = plan_for_dims((2, 320, 288))
        assert plan.mode is TilingMode.HIGH
        assert plan.positions == [(0, 0), (0, 32), (64, 0), (64, 32)]

    def test_high_on_exact_multiple(self):
        plan = plan_for_dims((1, 512, 512), "high")
        starts = sorted({r for r, _ in plan.positions})
        assert starts == [0, 128, 256]

    @pytest.mark.parametrize(
        "dims, mode",
        [
            ((1, 256, 256), "low"),
            ((1, 128, 300), "high"),
            ((1, 300, 300), "pad"),
        ],
    )
    def test_unsupported_geometry(self, dims, mode):
        with pytest.raises(UnsupportedGeometryError):
            plan_for_dims(dims, mode)

    def test_rejects_empty_dims(self):
        with pytest.raises(VolumeShapeError):
            plan_for_dims((0, 64, 64))

    @settings(max_examples=25, deadline=None)
    @given(height=st.integers(256, 700), width=st.integers(256, 700))
    def test_high_weights_are_a_partition_of_unity(self, height, width):
        plan = plan_for_dims((1, height, width), "high")
        total = np.zeros((height, width))
        for (row, col), weight in zip(plan.positions, plan.weights):
            total[row : row + PATCH_SIZE, col : col + PATCH_SIZE] += weight
        npt.assert_allclose(total, 1.0, atol=1e-12)


class TestSliceStacks:
    def test_pad_round_trip_is_exact(self, pad_volume):
        stacks = make_slice_stacks(pad_volume)
        assert len(stacks) == pad_volume.depth
        assert all(s.channels.shape == (PATCH_SIZE, PATCH_SIZE, 3) for s in stacks)
        rebuilt = reassemble_slices(stacks, plan_tiling(pad_volume))
        npt.assert_array_equal(rebuilt.voxels, pad_volume.voxels)

    def test_high_round_trip(self, high_phantom):
        volume = normalize_minmax(high_phantom)
        plan = plan_tiling(volume)
        stacks = make_slice_stacks(volume)
        assert len(stacks) == plan.patch_count
        npt.assert_allclose(reassemble_slices(stacks, plan).voxels, volume.voxels, atol=1e-6)

    def test_low_mode_shapes(self):
        volume = Volume(
            voxels=np.full((2, 512, 512), 0.25, dtype=np.float32),
            intensity_min=0.0,
            intensity_max=1.0,
            normalized=True,
        )
        stacks = make_slice_stacks(volume, "low")
        assert len(stacks) == 2
        rebuilt = reassemble_slices(stacks, plan_tiling(volume, "low"))
        assert rebuilt.shape == (2, 512, 512)
        npt.assert_allclose(rebuilt.voxels, 0.25, atol=1e-6)

    def test_edge_slices_repeat_themselves(self, pad_volume):
        stacks = make_slice_stacks(pad_volume)
        first, last = stacks[0], stacks[-1]
        npt.assert_array_equal(first.channels[..., 0], first.channels[..., 1])
        npt.assert_array_equal(last.channels[..., 2], last.channels[..., 1])

    def test_requires_normalized_input(self):
        with pytest.raises(RangeMetadataError):
            make_slice_stacks(_ramp(2, 8, 8))

    def test_missing_patch(self, pad_volume):
        stacks = make_slice_stacks(pad_volume)
        with pytest.raises(MissingPatchError):
            reassemble_slices(stacks[:-1], plan_tiling(pad_volume))

    def test_duplicate_stack(self, pad_volume):
        stacks = make_slice_stacks(pad_volume)
        with pytest.raises(PlanMismatchError):
            reassemble_slices(stacks + [stacks[0]], plan_tiling(pad_volume))

    def test_mode_mismatch(self, pad_volume, high_phantom):
        stacks = make_slice_stacks(pad_volume)
        with pytest.raises(PlanMismatchError):
            reassemble_slices(stacks, plan_tiling(normalize_minmax(high_phantom)))


class TestPhantom:
    def test_is_deterministic(self):
        a, mask_a = generate_phantom(7, (8, 32, 32), 2)
        b, mask_b = generate_phantom(7, (8, 32, 32), 2)
        npt.assert_array_equal(a.voxels, b.voxels)
        npt.assert_array_equal(mask_a.voxels, mask_b.voxels)

    def test_seed_changes_output(self):
        a, _ = generate_phantom(1, (8, 32, 32), 2)
        b, _ = generate_phantom(2, (8, 32, 32), 2)
        assert not np.array_equal(a.voxels, b.voxels)

    def test_mask_is_binary_and_nonempty(self, small_phantom):
        _, mask = small_phantom
        assert set(np.unique(mask.voxels)) <= {0.0, 1.0}
        assert mask.voxels.sum() > 0

    @pytest.mark.parametrize("dims", [(4, 32, 32), (8, 32)])
    def test_rejects_small_or_malformed_dims(self, dims):
        with pytest.raises(UsageError):
            generate_phantom(0, dims, 1)
