"""Per-entry statistical and naming detectors."""

from __future__ import annotations

import re

import numpy as np

from ..codec import compression_ratio
from .exceptions import EmptyInputError

STASH_PREFIX = "__stash"
_BARE_HEX32 = re.compile(r"[0-9a-fA-F]{32}")


def entropy_bits_per_byte(data: bytes) -> float:
    """Shannon entropy of the byte histogram, in bits per byte."""
    if not data:
        raise EmptyInputError("空数据没有熵")
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    probs = counts[counts > 0] / len(data)
    return float(max(0.0, -np.sum(probs * np.log2(probs))))


def deflate_ratio(data: bytes) -> float:
    return compression_ratio(data)


def suspicious_name(key: str) -> str | None:
    """Reason string when a key looks like a hidden-payload name."""
    if key.startswith(STASH_PREFIX):
        return f"key 以保留前缀 {STASH_PREFIX} 开头"
    if _BARE_HEX32.fullmatch(key):
        return "key 是无命名空间的 32 位十六进制串"
    return None


def clamp_score(value: float) -> float:
    return float(min(1.0, max(0.0, value)))
