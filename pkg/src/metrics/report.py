"""MetricReport, suite summaries, and the per-volume fidelity helper."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Iterable, Optional

import numpy as np

from ..utils import dump_json, from_jsonable_float, jsonable, setup_logger
from ..volume import Volume
from .fidelity import MIN_MS_SSIM_SIZE, ms_ssim, psnr
from .segmentation import MaskVolume, overlap_metrics, surface_metrics

logger = setup_logger(__name__)

CORE_FIELDS = ("psnr", "ms_ssim", "bpp", "dice", "voe", "rvd", "assd", "msd", "rmsd")


@dataclass
class MetricReport:
    """Flat metric record; fields not measured stay None."""

    psnr: Optional[float] = None
    ms_ssim: Optional[float] = None
    bpp: Optional[float] = None
    dice: Optional[float] = None
    voe: Optional[float] = None
    rvd: Optional[float] = None
    assd: Optional[float] = None
    msd: Optional[float] = None
    rmsd: Optional[float] = None
    practical_ratio: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        payload = {name: getattr(self, name) for name in CORE_FIELDS}
        if self.practical_ratio is not None:
            payload["practical_ratio"] = self.practical_ratio
        return jsonable(payload)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "MetricReport":
        known = {f.name for f in fields(cls)}
        values = {
            key: (None if value is None else from_jsonable_float(value))
            for key, value in payload.items()
            if key in known
        }
        return cls(**values)

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    def merge(self, other: "MetricReport") -> "MetricReport":
        """Fields set in ``other`` override ours."""
        mine = asdict(self)
        mine.update({k: v for k, v in asdict(other).items() if v is not None})
        return MetricReport(**mine)


def segmentation_report(p: MaskVolume, g: MaskVolume) -> MetricReport:
    dice, voe, rvd = overlap_metrics(p, g)
    report = MetricReport(dice=dice, voe=voe, rvd=rvd)
    if p.count and g.count:
        report.assd, report.msd, report.rmsd = surface_metrics(p, g)
    else:
        logger.warning("⚠️ mask 为空，跳过表面距离指标")
    return report


def fidelity_report(
    original: Volume,
    reconstruction: Volume,
    *,
    code_bytes: Optional[int] = None,
    zip_bytes: Optional[int] = None,
) -> MetricReport:
    """PSNR on the original intensity range, MS-SSIM on normalized slices, plus sizes."""
    peak = float(original.intensity_max - original.intensity_min) or 1.0
    report = MetricReport(psnr=psnr(original, reconstruction, peak=peak))

    if min(original.height, original.width) >= MIN_MS_SSIM_SIZE:
        lo, hi = original.intensity_min, original.intensity_max
        scale = (hi - lo) or 1.0
        a = np.clip((original.voxels - lo) / scale, 0.0, 1.0)
        b = np.clip((reconstruction.voxels - lo) / scale, 0.0, 1.0)
        report.ms_ssim = ms_ssim(a, b)
    else:
        logger.info("切片小于 %s，跳过 MS-SSIM", MIN_MS_SSIM_SIZE)

    if code_bytes is not None:
        report.bpp = 8.0 * code_bytes / original.voxel_count
        if zip_bytes:
            report.practical_ratio = code_bytes / zip_bytes
    return report


def summarize(reports: Iterable[MetricReport]) -> Dict[str, Dict[str, float]]:
    """Mean ± std per field over a suite; infinities are excluded and counted."""
    reports = list(reports)
    summary: Dict[str, Dict[str, float]] = {}
    for name in CORE_FIELDS + ("practical_ratio",):
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        if not values:
            continue
        finite = [v for v in values if math.isfinite(v)]
        summary[name] = {
            "mean": float(np.mean(finite)) if finite else math.nan,
            "std": float(np.std(finite)) if finite else math.nan,
            "count": len(finite),
            "infinite": len(values) - len(finite),
        }
    return summary
