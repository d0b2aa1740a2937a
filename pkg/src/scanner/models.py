"""Finding, verdict, and threshold types for the export scanner."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

GLOBAL_KEY = "<global>"


class FindingKind(str, Enum):
    UNKNOWN_KEY = "UnknownKey"
    SHAPE_MISMATCH = "ShapeMismatch"
    DTYPE_MISMATCH = "DTypeMismatch"
    SIZE_ANOMALY = "SizeAnomaly"
    HIGH_ENTROPY = "HighEntropy"
    INCOMPRESSIBLE = "Incompressible"
    SUSPICIOUS_NAME = "SuspiciousName"


class Severity(str, Enum):
    INFO = "Info"
    WARN = "Warn"
    ALERT = "Alert"


class Verdict(str, Enum):
    CLEAN = "Clean"
    SUSPICIOUS = "Suspicious"
    FLAGGED = "Flagged"

    @property
    def exit_code(self) -> int:
        return {Verdict.CLEAN: 0, Verdict.SUSPICIOUS: 1, Verdict.FLAGGED: 2}[self]


@dataclass(frozen=True)
class ScanThresholds:
    entropy_threshold: float = 7.5
    incompressible_threshold: float = 0.95
    min_entry_bytes: int = 4096
    size_tolerance: float = 0.01
    reference_backbone_bytes: int = 576_000_000

    @classmethod
    def from_config(cls, settings: Dict[str, Any]) -> "ScanThresholds":
        known = cls.__dataclass_fields__
        return cls(**{k: v for k, v in settings.items() if k in known and v is not None})


@dataclass(frozen=True)
class ScanFinding:
    key: str
    kind: FindingKind
    severity: Severity
    details: str
    score: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "key": self.key,
            "kind": self.kind.value,
            "severity": self.severity.value,
            "details": self.details,
            "score": self.score,
        }


@dataclass
class ScanReport:
    findings: List[ScanFinding] = field(default_factory=list)
    declared_bytes: int = 0
    expected_bytes: Optional[int] = None

    @property
    def verdict(self) -> Verdict:
        severities = {f.severity for f in self.findings}
        if Severity.ALERT in severities:
            return Verdict.FLAGGED
        if Severity.WARN in severities:
            return Verdict.SUSPICIOUS
        return Verdict.CLEAN

    def by_kind(self, kind: FindingKind) -> List[ScanFinding]:
        return [f for f in self.findings if f.kind is kind]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "declared_bytes": self.declared_bytes,
            "expected_bytes": self.expected_bytes,
            "findings": [f.to_dict() for f in self.findings],
        }
