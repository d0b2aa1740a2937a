"""Audit an exported checkpoint for hidden payloads.

Manifest checks compare every entry with the defender's architecture
manifest. The byte-entropy and DEFLATE-ratio tests are this toolkit's own
statistical detectors and run with or without a manifest.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from ..checkpoint import ArchitectureManifest, Checkpoint, TensorEntry
from ..checkpoint.models import ManifestEntry
from ..utils import setup_logger
from .detectors import clamp_score, deflate_ratio, entropy_bits_per_byte, suspicious_name
from .models import (
    GLOBAL_KEY,
    FindingKind,
    ScanFinding,
    ScanReport,
    ScanThresholds,
    Severity,
)

logger = setup_logger(__name__)

# entropy and ratio headroom mapped onto [0, 1]
ENTROPY_SCORE_SPAN = 0.5
RATIO_SCORE_SPAN = 0.05


def _alert(key: str, kind: FindingKind, details: str) -> ScanFinding:
    return ScanFinding(key=key, kind=kind, severity=Severity.ALERT, details=details, score=1.0)


def _manifest_findings(entry: TensorEntry, expected: Optional[ManifestEntry]) -> List[ScanFinding]:
    if expected is None:
        return [_alert(entry.key, FindingKind.UNKNOWN_KEY, "key 不在架构清单中")]
    findings = []
    if entry.dtype is not expected.dtype:
        findings.append(
            _alert(
                entry.key,
                FindingKind.DTYPE_MISMATCH,
                f"dtype {entry.dtype.name} ≠ 期望 {expected.dtype.name}",
            )
        )
    if entry.shape != expected.shape:
        findings.append(
            _alert(entry.key, FindingKind.SHAPE_MISMATCH, f"shape {entry.shape} ≠ 期望 {expected.shape}")
        )
    return findings


def _statistical_findings(entry: TensorEntry, thresholds: ScanThresholds) -> List[ScanFinding]:
    if len(entry.payload) < thresholds.min_entry_bytes:
        return []
    findings = []
    entropy = entropy_bits_per_byte(entry.payload)
    if entropy > thresholds.entropy_threshold:
        findings.append(
            ScanFinding(
                key=entry.key,
                kind=FindingKind.HIGH_ENTROPY,
                severity=Severity.WARN,
                details=f"字节熵 {entropy:.4f} bits/byte > {thresholds.entropy_threshold}",
                score=clamp_score((entropy - thresholds.entropy_threshold) / ENTROPY_SCORE_SPAN),
            )
        )
    ratio = deflate_ratio(entry.payload)
    if ratio > thresholds.incompressible_threshold:
        findings.append(
            ScanFinding(
                key=entry.key,
                kind=FindingKind.INCOMPRESSIBLE,
                severity=Severity.WARN,
                details=f"DEFLATE 压缩比 {ratio:.4f} > {thresholds.incompressible_threshold}",
                score=clamp_score((ratio - thresholds.incompressible_threshold) / RATIO_SCORE_SPAN),
            )
        )
    return findings


def _entry_findings(
    entry: TensorEntry,
    manifest_lookup: Optional[dict],
    thresholds: ScanThresholds,
) -> List[ScanFinding]:
    findings: List[ScanFinding] = []
    if manifest_lookup is not None:
        findings.extend(_manifest_findings(entry, manifest_lookup.get(entry.key)))
    findings.extend(_statistical_findings(entry, thresholds))
    reason = suspicious_name(entry.key)
    if reason:
        findings.append(_alert(entry.key, FindingKind.SUSPICIOUS_NAME, reason))
    return findings


def _size_finding(
    declared: int, manifest: Optional[ArchitectureManifest], thresholds: ScanThresholds
) -> Optional[ScanFinding]:
    if manifest is not None:
        limit = manifest.expected_total_bytes * (1.0 + thresholds.size_tolerance)
        if declared > limit:
            return _alert(
                GLOBAL_KEY,
                FindingKind.SIZE_ANOMALY,
                f"导出大小 {declared} 字节超过期望 {manifest.expected_total_bytes} 字节 "
                f"(容差 {thresholds.size_tolerance:.2%})",
            )
        return None
    reference = thresholds.reference_backbone_bytes
    if reference > 0 and declared > reference:
        return ScanFinding(
            key=GLOBAL_KEY,
            kind=FindingKind.SIZE_ANOMALY,
            severity=Severity.INFO,
            details=f"导出大小 {declared} 字节大于参考骨干网络 {reference} 字节",
            score=clamp_score(declared / reference - 1.0),
        )
    return None


def scan(
    checkpoint: Checkpoint,
    manifest: Optional[ArchitectureManifest] = None,
    thresholds: Optional[ScanThresholds] = None,
    *,
    threads: int = 1,
) -> ScanReport:
    """Findings come out in checkpoint entry order, with the size audit last."""
    thresholds = thresholds or ScanThresholds()
    lookup = manifest.lookup() if manifest is not None else None
    entries = list(checkpoint)

    if threads > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_entry = list(pool.map(lambda e: _entry_findings(e, lookup, thresholds), entries))
    else:
        per_entry = [_entry_findings(e, lookup, thresholds) for e in entries]

    declared = checkpoint.total_size()
    report = ScanReport(
        findings=[f for group in per_entry for f in group],
        declared_bytes=declared,
        expected_bytes=manifest.expected_total_bytes if manifest is not None else None,
    )
    size = _size_finding(declared, manifest, thresholds)
    if size is not None:
        report.findings.append(size)

    logger.info(
        "🛡️ 扫描完成: %s 个条目，%s 条发现，结论=%s",
        len(entries),
        len(report.findings),
        report.verdict.value,
    )
    return report
