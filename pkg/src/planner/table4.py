"""Reference component sizes and the 100-image export table built from them.

All sizes are whole bytes (MB = 10^6). Per-image code sizes are the table's
own deltas: (D + UB + 100·code) − (D + UB), divided by 100.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

from ..utils import setup_logger
from .budget import MB, StrategyCosts, export_size, max_images

logger = setup_logger(__name__)

DECODER_BYTES = 598 * MB
UTILITY_BRANCH_BYTES = 3 * MB
STOLEN_IMAGES = 100

LITS_HIGH_BYTES = 21_990_000
LITS_LOW_BYTES = 2_270_000
LITS_ZIP_BYTES = 134 * MB
LITS_PLAIN_UTILITY_BYTES = 66 * MB

BRATS_HIGH_BYTES = 910_000
BRATS_ZIP_BYTES = 2_300_000
BRATS_PLAIN_UTILITY_BYTES = 30 * MB

FL_BUDGET_BYTES = 100 * MB
FL_CLAIMED_IMAGES = 50


def _lossy(name: str, per_image: int) -> StrategyCosts:
    return StrategyCosts(
        name=name,
        fixed_bytes=DECODER_BYTES + UTILITY_BRANCH_BYTES,
        per_image_bytes=per_image,
        decoder_required=True,
        decoder_bytes=DECODER_BYTES,
    )


def _lossless(name: str, plain_utility: int, per_image: int) -> StrategyCosts:
    return StrategyCosts(name=name, fixed_bytes=plain_utility, per_image_bytes=per_image)


def lits_strategies() -> List[StrategyCosts]:
    return [
        _lossy("lits-high", LITS_HIGH_BYTES),
        _lossy("lits-low", LITS_LOW_BYTES),
        _lossless("lits-zip", LITS_PLAIN_UTILITY_BYTES, LITS_ZIP_BYTES),
    ]


def brats_strategies() -> List[StrategyCosts]:
    return [
        _lossy("brats-high", BRATS_HIGH_BYTES),
        _lossless("brats-zip", BRATS_PLAIN_UTILITY_BYTES, BRATS_ZIP_BYTES),
    ]


@dataclass(frozen=True)
class Table4Row:
    dataset: str
    decoder_mb: int
    decoder_utility_mb: int
    high_mb: int
    low_mb: Optional[int]
    zip_mb: int

    def as_tuple(self) -> tuple:
        return (self.decoder_mb, self.decoder_utility_mb, self.high_mb, self.low_mb, self.zip_mb)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _mb(size: int) -> int:
    whole, rest = divmod(size, MB)
    if rest:
        raise ValueError(f"{size} 字节不是整 MB")
    return whole


def _row(dataset: str, strategies: List[StrategyCosts]) -> Table4Row:
    by_kind = {s.name.rsplit("-", 1)[1]: s for s in strategies}
    low = by_kind.get("low")
    return Table4Row(
        dataset=dataset,
        decoder_mb=_mb(DECODER_BYTES),
        decoder_utility_mb=_mb(DECODER_BYTES + UTILITY_BRANCH_BYTES),
        high_mb=_mb(export_size(by_kind["high"], STOLEN_IMAGES)),
        low_mb=_mb(export_size(low, STOLEN_IMAGES)) if low else None,
        zip_mb=_mb(export_size(by_kind["zip"], STOLEN_IMAGES)),
    )


def table4_reproduction() -> List[Table4Row]:
    """Disk size (MB) needed to steal 100 images per dataset and strategy."""
    return [_row("LiTS", lits_strategies()), _row("BraTS", brats_strategies())]


def fl_budget_check(budget: int = FL_BUDGET_BYTES) -> Dict[str, Any]:
    """Images a pre-shared-decoder FL update of ``budget`` bytes can carry.

    The per-image Low size gives fewer than the 50 CT images usually quoted
    for 100 MB, so both counts are returned.
    """
    costs = StrategyCosts(
        name="fl-low-preshared",
        fixed_bytes=UTILITY_BRANCH_BYTES,
        per_image_bytes=LITS_LOW_BYTES,
    )
    images = max_images(costs, budget)
    needed = export_size(costs, FL_CLAIMED_IMAGES)
    if images < FL_CLAIMED_IMAGES:
        logger.warning(
            "⚠️ FL 预算 %s 字节只能容纳 %s 张图像；%s 张需要 %s 字节",
            budget,
            images,
            FL_CLAIMED_IMAGES,
            needed,
        )
    return {
        "budget_bytes": budget,
        "images": images,
        "claimed_images": FL_CLAIMED_IMAGES,
        "bytes_for_claimed": needed,
    }
