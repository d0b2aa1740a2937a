from __future__ import annotations

import numpy as np
import pytest

from src.checkpoint import ArchitectureManifest, DTypeCode, TensorEntry
from src.checkpoint.synthetic import UTILITY_BRANCH_LAYERS, synthetic_model
from src.scanner import (
    GLOBAL_KEY,
    EmptyInputError,
    FindingKind,
    ScanThresholds,
    Severity,
    Verdict,
    deflate_ratio,
    entropy_bits_per_byte,
    scan,
    suspicious_name,
)
from src.stash import DisguiseMode, embed

DEDICATED = DisguiseMode.dedicated()
MIMIC = DisguiseMode.mimic("hidden")


@pytest.fixture
def manifest(carrier) -> ArchitectureManifest:
    return ArchitectureManifest.from_checkpoint(carrier)


@pytest.fixture
def secret_bytes() -> bytes:
    return np.random.default_rng(9).bytes(8192)


class TestDetectors:
    def test_uniform_histogram_is_eight_bits(self):
        assert entropy_bits_per_byte(bytes(range(256)) * 4) == pytest.approx(8.0)

    def test_constant_is_zero_bits(self):
        assert entropy_bits_per_byte(b"\x00" * 100) == 0.0

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            entropy_bits_per_byte(b"")

    def test_gaussian_weights_stay_under_thresholds(self, carrier):
        payload = carrier.get_entry("branch.conv1.weight").payload
        assert entropy_bits_per_byte(payload) < 7.5
        assert deflate_ratio(payload) < 0.95

    def test_random_bytes_exceed_thresholds(self, secret_bytes):
        assert entropy_bits_per_byte(secret_bytes) > 7.9
        assert deflate_ratio(secret_bytes) > 0.99

    @pytest.mark.parametrize(
        "key, flagged",
        [
            ("__stash/chunk_00000000", True),
            ("__stash_anything", True),
            ("0123456789abcdef0123456789ABCDEF", True),
            ("opt_state/0123456789abcdef0123456789abcdef", False),
            ("0123456789abcdef", False),
            ("encoder.layer1.weight", False),
        ],
    )
    def test_suspicious_name(self, key, flagged):
        assert (suspicious_name(key) is not None) is flagged


class TestScan:
    def test_clean_export(self, carrier, manifest):
        report = scan(carrier, manifest)
        assert report.findings == []
        assert report.verdict is Verdict.CLEAN
        assert report.declared_bytes == report.expected_bytes == carrier.total_size()

    def test_dedicated_keys_with_manifest(self, carrier, manifest, secret_bytes):
        stashed = embed(carrier, secret_bytes, DEDICATED, 4096).checkpoint
        report = scan(stashed, manifest)
        assert report.verdict is Verdict.FLAGGED
        added = stashed.keys[len(carrier) :]
        assert {f.key for f in report.by_kind(FindingKind.UNKNOWN_KEY)} == set(added)
        assert {f.key for f in report.by_kind(FindingKind.SUSPICIOUS_NAME)} == set(added)
        assert report.findings[-1].kind is FindingKind.SIZE_ANOMALY
        assert report.findings[-1].key == GLOBAL_KEY

    def test_mimic_keys_without_manifest_are_suspicious(self, carrier, secret_bytes):
        stashed = embed(carrier, secret_bytes, MIMIC, 8192).checkpoint
        report = scan(stashed)
        assert report.verdict is Verdict.SUSPICIOUS
        assert report.by_kind(FindingKind.SUSPICIOUS_NAME) == []
        flagged = {f.key for f in report.by_kind(FindingKind.HIGH_ENTROPY)}
        assert flagged == {stashed.keys[len(carrier)]}
        assert report.by_kind(FindingKind.INCOMPRESSIBLE)
        assert all(f.severity is Severity.WARN for f in report.findings)

    def test_mimic_keys_with_manifest_are_flagged(self, carrier, manifest, secret_bytes):
        stashed = embed(carrier, secret_bytes, MIMIC, 8192).checkpoint
        assert scan(stashed, manifest).verdict is Verdict.FLAGGED

    def test_small_chunks_slip_past_statistics(self, carrier, secret_bytes):
        stashed = embed(carrier, secret_bytes[:2000], MIMIC, 1000).checkpoint
        assert scan(stashed).verdict is Verdict.CLEAN

    def test_shape_and_dtype_mismatch(self, carrier, manifest):
        entry = carrier.remove_entry("branch.head.bias")
        carrier.add_entry(TensorEntry.from_array(entry.key, np.zeros(3, dtype=np.float64)))
        report = scan(carrier, manifest)
        kinds = {f.kind for f in report.findings if f.key == entry.key}
        assert kinds == {FindingKind.SHAPE_MISMATCH, FindingKind.DTYPE_MISMATCH}
        assert report.verdict is Verdict.FLAGGED

    def test_size_within_tolerance(self, carrier, manifest):
        carrier.add_entry(TensorEntry(key="extra", dtype=DTypeCode.U8, shape=(8,), payload=bytes(8)))
        report = scan(carrier, manifest)
        assert report.by_kind(FindingKind.SIZE_ANOMALY) == []
        assert [f.kind for f in report.findings] == [FindingKind.UNKNOWN_KEY]

    def test_reference_size_gives_info_only(self, carrier):
        report = scan(carrier, thresholds=ScanThresholds(reference_backbone_bytes=1000))
        [finding] = report.findings
        assert finding.kind is FindingKind.SIZE_ANOMALY
        assert finding.severity is Severity.INFO
        assert report.verdict is Verdict.CLEAN

    def test_thresholds_are_configurable(self, carrier):
        strict = ScanThresholds(entropy_threshold=5.0, incompressible_threshold=0.5)
        assert scan(carrier, thresholds=strict).verdict is Verdict.SUSPICIOUS

    def test_threads_keep_order(self, carrier, manifest, secret_bytes):
        stashed = embed(carrier, secret_bytes, DEDICATED, 1024).checkpoint
        assert scan(stashed, manifest, threads=4).to_dict() == scan(stashed, manifest).to_dict()

    def test_scores_are_bounded(self, carrier, secret_bytes):
        stashed = embed(carrier, secret_bytes, MIMIC, 8192).checkpoint
        assert all(0.0 <= f.score <= 1.0 for f in scan(stashed).findings)

    def test_report_dict(self, carrier, manifest):
        payload = scan(carrier, manifest).to_dict()
        assert payload["verdict"] == "Clean"
        assert payload["findings"] == []


@pytest.mark.parametrize("verdict, code", [(Verdict.CLEAN, 0), (Verdict.SUSPICIOUS, 1), (Verdict.FLAGGED, 2)])
def test_verdict_exit_codes(verdict, code):
    assert verdict.exit_code == code


class TestEfficacy:
    """Seeded fixture suites at default thresholds."""

    FIXTURES = 100

    def test_dedicated_keys_always_alert(self):
        rng = np.random.default_rng(7)
        for seed in range(self.FIXTURES):
            carrier = synthetic_model(seed)
            payload = rng.bytes(int(rng.integers(100, 20_000)))
            stashed = embed(carrier, payload, DEDICATED, int(rng.integers(64, 8192))).checkpoint
            report = scan(stashed)
            assert any(f.severity is Severity.ALERT for f in report.findings)
            assert report.verdict is Verdict.FLAGGED

    @pytest.mark.parametrize("distribution", ["gaussian", "uniform"])
    @pytest.mark.parametrize(
        "layers, fixtures",
        [(UTILITY_BRANCH_LAYERS, FIXTURES), (UTILITY_BRANCH_LAYERS + [("backbone.block0.weight", (1 << 20,))], 20)],
        ids=["branch", "with-4MiB-layer"],
    )
    def test_clean_exports_raise_no_alerts(self, distribution, layers, fixtures):
        manifest = ArchitectureManifest.from_checkpoint(synthetic_model(0, layers, distribution=distribution))
        warned = 0
        for seed in range(fixtures):
            report = scan(synthetic_model(seed, layers, distribution=distribution), manifest)
            assert not any(f.severity is Severity.ALERT for f in report.findings)
            warned += report.verdict is Verdict.SUSPICIOUS
        assert warned <= fixtures // 20

    def test_mimic_keys_are_at_least_suspicious(self):
        rng = np.random.default_rng(8)
        caught = 0
        for seed in range(self.FIXTURES):
            payload = rng.bytes(int(rng.integers(8192, 32_768)))
            mode = DisguiseMode.mimic(f"s{seed}")
            stashed = embed(synthetic_model(seed), payload, mode, 8192).checkpoint
            caught += scan(stashed).verdict is not Verdict.CLEAN
        assert caught >= 95
