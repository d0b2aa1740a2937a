from __future__ import annotations

import io
import struct
import zipfile

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.checkpoint import (
    ArchitectureManifest,
    BadMagicError,
    Checkpoint,
    CheckpointError,
    ContainerFormat,
    DTypeCode,
    DuplicateKeyError,
    InvalidDTypeError,
    InvalidKeyError,
    MalformedArchiveError,
    ManifestFormatError,
    MissingKeyError,
    ShapeMismatchError,
    TensorEntry,
    TrailingDataError,
    TruncatedError,
    UnsupportedLayoutError,
    UnsupportedVersionError,
    load_checkpoint,
    parse_npz,
    parse_wdc,
    save_checkpoint,
    serialize_npz,
    serialize_wdc,
)
from src.checkpoint.synthetic import UTILITY_BRANCH_LAYERS, layers_for_bytes, synthetic_model


class TestTensorEntry:
    def test_from_array_records_dtype_and_shape(self):
        entry = TensorEntry.from_array("x", np.zeros((2, 3), dtype=np.float64))
        assert entry.dtype is DTypeCode.F64
        assert entry.shape == (2, 3)
        assert len(entry.payload) == 48

    def test_scalar_entry(self):
        entry = TensorEntry.from_array("step", np.array(7, dtype=np.int64))
        assert entry.shape == ()
        assert entry.to_array() == 7

    def test_payload_must_match_shape(self):
        with pytest.raises(ShapeMismatchError):
            TensorEntry(key="x", dtype=DTypeCode.F32, shape=(3,), payload=b"\x00" * 8)

    def test_empty_key(self):
        with pytest.raises(InvalidKeyError):
            TensorEntry(key="", dtype=DTypeCode.U8, shape=(1,), payload=b"\x00")

    def test_unsupported_numpy_dtype(self):
        with pytest.raises(InvalidDTypeError):
            TensorEntry.from_array("x", np.zeros(2, dtype=np.int32))


class TestCheckpoint:
    def test_duplicate_keys_rejected(self, golden_checkpoint):
        with pytest.raises(DuplicateKeyError):
            golden_checkpoint.add_entry(TensorEntry.from_array("w", np.zeros(1, dtype=np.float32)))

    def test_get_and_remove(self, golden_checkpoint):
        assert golden_checkpoint.get_entry("step").to_array() == 7
        golden_checkpoint.remove_entry("step")
        assert golden_checkpoint.keys == ["w"]
        with pytest.raises(MissingKeyError):
            golden_checkpoint.get_entry("step")

    def test_total_size_matches_serialized_length(self, carrier):
        assert carrier.total_size() == len(serialize_wdc(carrier))

    def test_equality_ignores_format_tag(self, golden_checkpoint):
        other = golden_checkpoint.copy()
        other.format = ContainerFormat.NPZ
        assert other == golden_checkpoint


class TestWdc:
    def test_golden_bytes(self, golden_checkpoint, golden_wdc_bytes):
        assert len(golden_wdc_bytes) == 73
        assert serialize_wdc(golden_checkpoint) == golden_wdc_bytes
        assert parse_wdc(golden_wdc_bytes) == golden_checkpoint

    def test_empty_checkpoint(self):
        data = serialize_wdc(Checkpoint())
        assert data == b"WDC1" + struct.pack("<IQ", 1, 0)
        assert parse_wdc(data) == Checkpoint()

    def test_every_strict_prefix_is_rejected(self, golden_wdc_bytes):
        for end in range(len(golden_wdc_bytes)):
            with pytest.raises(CheckpointError):
                parse_wdc(golden_wdc_bytes[:end])

    def test_truncated_payload(self, golden_wdc_bytes):
        with pytest.raises(TruncatedError):
            parse_wdc(golden_wdc_bytes[:-1])

    def test_trailing_data(self, golden_wdc_bytes):
        with pytest.raises(TrailingDataError):
            parse_wdc(golden_wdc_bytes + b"\x00")

    def test_bad_magic(self, golden_wdc_bytes):
        with pytest.raises(BadMagicError):
            parse_wdc(b"WDC2" + golden_wdc_bytes[4:])

    def test_bad_version(self, golden_wdc_bytes):
        with pytest.raises(UnsupportedVersionError):
            parse_wdc(golden_wdc_bytes[:4] + struct.pack("<I", 2) + golden_wdc_bytes[8:])

    def test_unknown_dtype_code(self, golden_wdc_bytes):
        data = bytearray(golden_wdc_bytes)
        data[21] = 9
        with pytest.raises(InvalidDTypeError):
            parse_wdc(bytes(data))

    def test_payload_len_disagrees_with_shape(self, golden_wdc_bytes):
        data = bytearray(golden_wdc_bytes)
        data[31:39] = struct.pack("<Q", 4)
        with pytest.raises(ShapeMismatchError):
            parse_wdc(bytes(data))

    def test_duplicate_key_in_file(self):
        entry = TensorEntry.from_array("a", np.zeros(1, dtype=np.uint8))
        body = serialize_wdc(Checkpoint(entries=[entry]))[16:]
        data = b"WDC1" + struct.pack("<IQ", 1, 2) + body + body
        with pytest.raises(DuplicateKeyError):
            parse_wdc(data)

    def test_file_round_trip(self, tmp_path, carrier):
        path = tmp_path / "model.wdc"
        written = save_checkpoint(carrier, path)
        assert written == carrier.total_size() == path.stat().st_size
        assert load_checkpoint(path) == carrier

    @settings(max_examples=200, deadline=None)
    @given(st.binary(max_size=256))
    def test_arbitrary_bytes_raise_only_checkpoint_errors(self, data):
        try:
            parse_wdc(data)
        except CheckpointError:
            pass


class TestNpz:
    def test_round_trip(self, carrier):
        parsed = parse_npz(serialize_npz(carrier))
        assert parsed == carrier
        assert parsed.format is ContainerFormat.NPZ

    def test_is_deterministic(self, carrier):
        assert serialize_npz(carrier) == serialize_npz(carrier)

    def test_numpy_can_read_it(self, golden_checkpoint):
        with np.load(io.BytesIO(serialize_npz(golden_checkpoint))) as archive:
            npt.assert_array_equal(archive["w"], [1.0, -2.0])
            assert int(archive["step"]) == 7

    def test_reads_numpy_savez(self):
        buffer = io.BytesIO()
        np.savez(buffer, a=np.arange(4, dtype=np.float32), b=np.ones((2, 2), dtype=np.uint8))
        parsed = parse_npz(buffer.getvalue())
        assert parsed.keys == ["a", "b"]
        assert parsed.get_entry("b").dtype is DTypeCode.U8

    def test_rejects_fortran_order(self):
        buffer = io.BytesIO()
        np.savez(buffer, a=np.asfortranarray(np.ones((2, 3), dtype=np.float32)))
        with pytest.raises(UnsupportedLayoutError):
            parse_npz(buffer.getvalue())

    def test_rejects_unsupported_descr(self):
        buffer = io.BytesIO()
        np.savez(buffer, a=np.ones(3, dtype=np.int32))
        with pytest.raises(UnsupportedLayoutError):
            parse_npz(buffer.getvalue())

    def test_rejects_non_npy_member(self):
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w") as archive:
            archive.writestr("notes.txt", "hello")
        with pytest.raises(MalformedArchiveError):
            parse_npz(buffer.getvalue())

    def test_rejects_garbage(self):
        with pytest.raises(MalformedArchiveError):
            parse_npz(b"not a zip at all")

    @pytest.mark.parametrize("key", ["../x", "/abs", "a//b", "dir/", "x\\y"])
    def test_odd_keys_round_trip(self, key):
        checkpoint = Checkpoint()
        checkpoint.add_entry(TensorEntry.from_array(key, np.arange(3, dtype=np.float32)))
        assert parse_npz(serialize_npz(checkpoint)).keys == [key]

    def test_nul_key_is_wdc_only(self):
        checkpoint = Checkpoint()
        checkpoint.add_entry(TensorEntry.from_array("a\x00b", np.ones(2, dtype=np.float32)))
        assert parse_wdc(serialize_wdc(checkpoint)).keys == ["a\x00b"]
        with pytest.raises(InvalidKeyError, match="NUL"):
            serialize_npz(checkpoint)

    def test_suffix_selects_format(self, tmp_path, carrier):
        path = tmp_path / "model.npz"
        save_checkpoint(carrier, path)
        assert zipfile.is_zipfile(path)
        assert load_checkpoint(path) == carrier


class TestArchitectureManifest:
    def test_from_checkpoint(self, carrier):
        manifest = ArchitectureManifest.from_checkpoint(carrier)
        assert [e.key for e in manifest.entries] == carrier.keys
        assert manifest.expected_total_bytes == carrier.total_size()

    def test_json_round_trip(self, tmp_path, carrier):
        manifest = ArchitectureManifest.from_checkpoint(carrier)
        path = tmp_path / "manifest.json"
        manifest.save(path)
        loaded = ArchitectureManifest.load(path)
        assert loaded.entries == manifest.entries
        assert loaded.expected_total_bytes == manifest.expected_total_bytes

    @pytest.mark.parametrize(
        "payload",
        [
            {"entries": []},
            {"expected_total_bytes": 1, "entries": [{"key": "a", "dtype": "F16", "shape": [1]}]},
            {"expected_total_bytes": 1, "entries": [{"key": "a"}]},
        ],
    )
    def test_malformed(self, payload):
        with pytest.raises(ManifestFormatError):
            ArchitectureManifest.from_dict(payload)

    def test_non_object_file(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ManifestFormatError):
            ArchitectureManifest.load(path)


class TestSyntheticModel:
    def test_default_layout(self, carrier):
        assert carrier.keys == [key for key, _ in UTILITY_BRANCH_LAYERS]
        assert all(entry.dtype is DTypeCode.F32 for entry in carrier)

    def test_seeded(self):
        assert synthetic_model(1) == synthetic_model(1)
        assert synthetic_model(1) != synthetic_model(2)

    @pytest.mark.parametrize("total", [4, 1000, (1 << 20) + 12])
    def test_layers_for_bytes(self, total):
        layers = layers_for_bytes(total)
        assert sum(shape[0] for _, shape in layers) * 4 == total

    def test_weights_are_small_gaussians(self, carrier):
        weights = carrier.get_entry("branch.conv1.weight").to_array()
        assert abs(float(weights.mean())) < 0.01
        assert 0.04 < float(weights.std()) < 0.06


def _random_checkpoint(rng: np.random.Generator) -> Checkpoint:
    entries = []
    for index in range(int(rng.integers(0, 6))):
        dtype = DTypeCode(int(rng.integers(len(DTypeCode))))
        shape = tuple(int(n) for n in rng.integers(1, 6, size=int(rng.integers(0, 4))))
        count = int(np.prod(shape)) if shape else 1
        key = f"layer{index}.{'weight' if rng.random() < 0.5 else 'bias'}"
        entries.append(TensorEntry(key=key, dtype=dtype, shape=shape, payload=rng.bytes(count * dtype.width)))
    return Checkpoint(entries)


class TestRandomCheckpoints:
    """Seeded suites of random checkpoints through both containers."""

    CASES = 500

    def test_wdc_value_identity_and_determinism(self):
        rng = np.random.default_rng(2024)
        for _ in range(self.CASES):
            checkpoint = _random_checkpoint(rng)
            data = serialize_wdc(checkpoint)
            assert len(data) == checkpoint.total_size()
            assert parse_wdc(data) == checkpoint
            assert serialize_wdc(parse_wdc(data)) == data

    def test_npz_value_identity(self):
        rng = np.random.default_rng(2025)
        for _ in range(self.CASES):
            checkpoint = _random_checkpoint(rng)
            data = serialize_npz(checkpoint)
            assert parse_npz(data) == checkpoint
            assert serialize_npz(checkpoint) == data
