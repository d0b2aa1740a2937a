from __future__ import annotations

import json

import pytest

from src.config import Config, _as_bool, _as_float, _as_int, load_json_config
from src.exceptions import UsageError
from src.scanner import ScanThresholds


class TestEnvParsing:
    def test_int(self, monkeypatch):
        monkeypatch.setenv("STASH_TEST_INT", " 42 ")
        assert _as_int("STASH_TEST_INT", 1) == 42

    def test_bad_int_falls_back(self, monkeypatch):
        monkeypatch.setenv("STASH_TEST_INT", "lots")
        assert _as_int("STASH_TEST_INT", 7) == 7

    def test_float(self, monkeypatch):
        monkeypatch.setenv("STASH_TEST_FLOAT", "0.25")
        assert _as_float("STASH_TEST_FLOAT", 1.0) == 0.25
        monkeypatch.setenv("STASH_TEST_FLOAT", "")
        assert _as_float("STASH_TEST_FLOAT", 1.5) == 1.5

    @pytest.mark.parametrize("raw, expected", [("true", True), ("ON", True), ("0", False), (None, False)])
    def test_bool(self, raw, expected):
        assert _as_bool(raw) is expected


class TestValidate:
    def test_defaults_are_valid(self):
        Config.validate()

    @pytest.mark.parametrize(
        "name, value",
        [
            ("STASH_CHUNK_SIZE", 63),
            ("CODEC_QUALITY", 0),
            ("CODEC_QUALITY", 101),
            ("CODEC_THREADS", 0),
            ("SCAN_ENTROPY_THRESHOLD", 8.5),
            ("SCAN_INCOMPRESSIBLE_THRESHOLD", 0.0),
            ("SCAN_MIN_ENTRY_BYTES", 0),
            ("SCAN_SIZE_TOLERANCE", -0.1),
            ("SIM_SCAN_DISGUISE", "stego"),
        ],
    )
    def test_rejects(self, monkeypatch, name, value):
        monkeypatch.setattr(Config, name, value)
        with pytest.raises(UsageError, match=name):
            Config.validate()

    def test_reports_every_problem(self, monkeypatch):
        monkeypatch.setattr(Config, "CODEC_THREADS", 0)
        monkeypatch.setattr(Config, "SCAN_MIN_ENTRY_BYTES", 0)
        with pytest.raises(UsageError) as info:
            Config.validate()
        assert "CODEC_THREADS" in str(info.value) and "SCAN_MIN_ENTRY_BYTES" in str(info.value)


class TestScannerSettings:
    def test_feeds_thresholds(self, monkeypatch):
        monkeypatch.setattr(Config, "SCAN_ENTROPY_THRESHOLD", 6.5)
        thresholds = ScanThresholds.from_config(Config.scanner_settings())
        assert thresholds.entropy_threshold == 6.5
        assert thresholds.min_entry_bytes == Config.SCAN_MIN_ENTRY_BYTES

    def test_ignores_unknown_and_none(self):
        thresholds = ScanThresholds.from_config({"entropy_threshold": None, "colour": "red"})
        assert thresholds == ScanThresholds()


class TestJsonConfig:
    def test_dashed_keys(self, tmp_path):
        path = tmp_path / "cli.json"
        path.write_text(json.dumps({"chunk-size": 4096, "quality": 50}), encoding="utf-8")
        assert load_json_config(path) == {"chunk_size": 4096, "quality": 50}

    def test_relative_path(self, tmp_path, monkeypatch):
        (tmp_path / "cli.json").write_text("{}", encoding="utf-8")
        monkeypatch.chdir(tmp_path)
        assert load_json_config("cli.json") == {}

    def test_not_json(self, tmp_path):
        path = tmp_path / "cli.json"
        path.write_text("quality = 50", encoding="utf-8")
        with pytest.raises(UsageError):
            load_json_config(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "cli.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(UsageError):
            load_json_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_json_config(tmp_path / "absent.json")
