"""Fidelity (PSNR, MS-SSIM) and segmentation metrics."""

from .exceptions import DimensionMismatchError, EmptyMaskError, InputTooSmallError, MetricsError
from .fidelity import MIN_MS_SSIM_SIZE, ms_ssim, ms_ssim_slice, psnr
from .report import MetricReport, fidelity_report, segmentation_report, summarize
from .segmentation import MaskVolume, overlap_metrics, surface_distances, surface_metrics

__all__ = [
    "DimensionMismatchError",
    "EmptyMaskError",
    "InputTooSmallError",
    "MIN_MS_SSIM_SIZE",
    "MaskVolume",
    "MetricReport",
    "MetricsError",
    "fidelity_report",
    "ms_ssim",
    "ms_ssim_slice",
    "overlap_metrics",
    "psnr",
    "segmentation_report",
    "summarize",
    "surface_distances",
    "surface_metrics",
]
