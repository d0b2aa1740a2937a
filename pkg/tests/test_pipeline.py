"""Full attack pipeline against the defense, on a 512×512 phantom."""

from __future__ import annotations

import pytest

from src.checkpoint import ArchitectureManifest, parse_npz, parse_wdc, serialize_npz, serialize_wdc
from src.checkpoint.synthetic import synthetic_model
from src.codec import VolumeCode, decode_volume, encode_volume, zip_volume
from src.metrics import fidelity_report
from src.scanner import Verdict, scan
from src.stash import DisguiseMode, embed, extract
from src.volume import TilingMode, generate_phantom, normalize_minmax

PSNR_FLOOR = 35.0


@pytest.mark.slow
@pytest.mark.parametrize("mode", [DisguiseMode.dedicated(), DisguiseMode.mimic("lake")], ids=["dedicated", "mimic"])
def test_high_mode_attack_end_to_end(mode):
    volume, _ = generate_phantom(seed=42, dims=(64, 512, 512), n_ellipsoids=5)
    code = encode_volume(normalize_minmax(volume), TilingMode.HIGH, 95, threads=4)
    assert len(code.codes) == 64 * 9
    payload = code.to_bytes()

    carrier = synthetic_model(seed=0)
    manifest = ArchitectureManifest.from_checkpoint(carrier)
    stashed = embed(carrier, payload, mode, 1 << 20).checkpoint

    exported = parse_wdc(serialize_wdc(stashed))
    assert parse_npz(serialize_npz(stashed)) == exported
    assert scan(exported, manifest).verdict is Verdict.FLAGGED

    recovered, _ = extract(exported, mode)
    assert recovered == payload

    reconstruction = decode_volume(VolumeCode.from_bytes(recovered), threads=4)
    assert reconstruction.shape == volume.shape
    report = fidelity_report(volume, reconstruction, code_bytes=len(payload), zip_bytes=len(zip_volume(volume)))
    assert report.psnr >= PSNR_FLOOR
    assert report.ms_ssim > 0.9
    assert report.practical_ratio < 1.0
