"""Utility helpers for logging, hashing, and JSON output."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import struct
import sys
import zlib
from pathlib import Path
from typing import Any

try:
    import colorlog
except ImportError:  # pragma: no cover - optional dependency
    colorlog = None  # type: ignore[assignment]


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

# JSON sentinel for +inf (PSNR of identical inputs, RVD against an empty mask)
INF_SENTINEL = "inf"


def setup_logger(name: str, level: str | None = None) -> logging.Logger:
    """Configure a color logger on stderr, plus a file handler when LOG_FILE is set.

    Standard output is reserved for the JSON documents the CLI emits, so every
    console record goes to stderr.
    """
    if level is None:
        level = os.getenv("LOG_LEVEL", "INFO")

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    if logger.handlers:
        return logger

    if colorlog is not None:
        console_handler = colorlog.StreamHandler(stream=sys.stderr)
        console_handler.setFormatter(
            colorlog.ColoredFormatter(
                "%(log_color)s" + LOG_FORMAT,
                datefmt=LOG_DATEFMT,
                log_colors={
                    "DEBUG": "cyan",
                    "INFO": "green",
                    "WARNING": "yellow",
                    "ERROR": "red",
                    "CRITICAL": "red,bg_white",
                },
            )
        )
    else:
        console_handler = logging.StreamHandler(stream=sys.stderr)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
    logger.addHandler(console_handler)

    log_file = os.getenv("LOG_FILE", "").strip()
    if log_file:
        Path(log_file).expanduser().parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger


def crc32(data: bytes) -> int:
    """IEEE CRC-32 (reflected polynomial, as used by ZIP)."""
    return zlib.crc32(data) & 0xFFFFFFFF


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def u32_le(value: int) -> bytes:
    return struct.pack("<I", value)


def ceil_div(numerator: int, denominator: int) -> int:
    """Integer ceiling division for non-negative numerators."""
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    return -(-numerator // denominator)


def jsonable(value: Any) -> Any:
    """Replace infinities with the "inf" sentinel, recursively."""
    if isinstance(value, float) and math.isinf(value):
        return INF_SENTINEL if value > 0 else "-" + INF_SENTINEL
    if isinstance(value, dict):
        return {key: jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    return value


def from_jsonable_float(value: Any) -> float:
    if value == INF_SENTINEL:
        return math.inf
    if value == "-" + INF_SENTINEL:
        return -math.inf
    return float(value)


def dump_json(payload: Any, *, indent: int | None = 2) -> str:
    """Deterministic JSON text (sorted keys, inf sentinels)."""
    return json.dumps(jsonable(payload), indent=indent, sort_keys=True, ensure_ascii=False)
