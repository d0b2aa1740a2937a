"""Configuration loader for the weight-stash toolkit."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv

from .exceptions import UsageError

load_dotenv()

logger = logging.getLogger(__name__)


def _as_bool(value: str | None, default: bool = False) -> bool:
    if value is None:
        return default
    return value.lower() in {"1", "true", "yes", "on"}


def _as_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("无法解析整数配置 %s=%s，使用默认值 %s", name, raw, default)
        return default


def _as_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("无法解析浮点配置 %s=%s，使用默认值 %s", name, raw, default)
        return default


MIN_CHUNK_SIZE = 64
DEFAULT_CHUNK_SIZE = 1 << 20


class Config:
    """Toolkit configuration loaded from the environment / .env."""

    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: str = os.getenv("LOG_FILE", "").strip()

    # Payload embedding
    STASH_CHUNK_SIZE: int = _as_int("STASH_CHUNK_SIZE", DEFAULT_CHUNK_SIZE)
    STASH_LABEL: str = os.getenv("STASH_LABEL", "")

    # Codec
    CODEC_QUALITY: int = _as_int("CODEC_QUALITY", 75)
    CODEC_THREADS: int = _as_int("CODEC_THREADS", 1)

    # Defense scanner thresholds
    SCAN_ENTROPY_THRESHOLD: float = _as_float("SCAN_ENTROPY_THRESHOLD", 7.5)
    SCAN_INCOMPRESSIBLE_THRESHOLD: float = _as_float("SCAN_INCOMPRESSIBLE_THRESHOLD", 0.95)
    SCAN_MIN_ENTRY_BYTES: int = _as_int("SCAN_MIN_ENTRY_BYTES", 4096)
    SCAN_SIZE_TOLERANCE: float = _as_float("SCAN_SIZE_TOLERANCE", 0.01)
    # VGG16-sized backbone; exports above it get an Info finding without a manifest
    SCAN_REFERENCE_BACKBONE_BYTES: int = _as_int("SCAN_REFERENCE_BACKBONE_BYTES", 576_000_000)

    # FL simulator
    SIM_SCAN_DISGUISE: str = os.getenv("SIM_SCAN_DISGUISE", "mimic").strip().lower()
    SIM_SCAN_WITH_MANIFEST: bool = _as_bool(os.getenv("SIM_SCAN_WITH_MANIFEST"), False)

    @classmethod
    def validate(cls) -> None:
        """Raise UsageError naming every invalid setting."""
        problems: list[str] = []
        if cls.STASH_CHUNK_SIZE < MIN_CHUNK_SIZE:
            problems.append(f"STASH_CHUNK_SIZE 必须 ≥ {MIN_CHUNK_SIZE}")
        if not 1 <= cls.CODEC_QUALITY <= 100:
            problems.append("CODEC_QUALITY 必须在 [1,100] 内")
        if cls.CODEC_THREADS < 1:
            problems.append("CODEC_THREADS 必须 ≥ 1")
        if not 0.0 <= cls.SCAN_ENTROPY_THRESHOLD <= 8.0:
            problems.append("SCAN_ENTROPY_THRESHOLD 必须在 [0,8] 内")
        if cls.SCAN_INCOMPRESSIBLE_THRESHOLD <= 0.0:
            problems.append("SCAN_INCOMPRESSIBLE_THRESHOLD 必须为正数")
        if cls.SCAN_MIN_ENTRY_BYTES < 1:
            problems.append("SCAN_MIN_ENTRY_BYTES 必须 ≥ 1")
        if cls.SCAN_SIZE_TOLERANCE < 0.0:
            problems.append("SCAN_SIZE_TOLERANCE 不能为负数")
        if cls.SIM_SCAN_DISGUISE not in {"dedicated", "mimic"}:
            problems.append("SIM_SCAN_DISGUISE 只能是 dedicated 或 mimic")
        if problems:
            raise UsageError("配置无效: " + "; ".join(problems))

    @classmethod
    def scanner_settings(cls) -> Dict[str, Any]:
        return {
            "entropy_threshold": cls.SCAN_ENTROPY_THRESHOLD,
            "incompressible_threshold": cls.SCAN_INCOMPRESSIBLE_THRESHOLD,
            "min_entry_bytes": cls.SCAN_MIN_ENTRY_BYTES,
            "size_tolerance": cls.SCAN_SIZE_TOLERANCE,
            "reference_backbone_bytes": cls.SCAN_REFERENCE_BACKBONE_BYTES,
        }


def load_json_config(path: str | Path) -> Dict[str, Any]:
    """Load a JSON object used as CLI defaults (flags still win)."""
    candidate = Path(path).expanduser()
    if not candidate.is_absolute():
        candidate = Path.cwd() / candidate
    try:
        payload = json.loads(candidate.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"配置文件不是合法 JSON: {candidate}: {exc}") from exc
    if not isinstance(payload, dict):
        raise UsageError(f"配置文件必须是 JSON 对象: {candidate}")
    return {str(key).replace("-", "_"): value for key, value in payload.items()}
