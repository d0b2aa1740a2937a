"""Defense scanner for exported weight containers."""

from .detectors import deflate_ratio, entropy_bits_per_byte, suspicious_name
from .exceptions import EmptyInputError
from .models import (
    GLOBAL_KEY,
    FindingKind,
    ScanFinding,
    ScanReport,
    ScanThresholds,
    Severity,
    Verdict,
)
from .scanner import scan

__all__ = [
    "EmptyInputError",
    "FindingKind",
    "GLOBAL_KEY",
    "ScanFinding",
    "ScanReport",
    "ScanThresholds",
    "Severity",
    "Verdict",
    "deflate_ratio",
    "entropy_bits_per_byte",
    "scan",
    "suspicious_name",
]
