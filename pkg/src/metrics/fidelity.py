"""PSNR and 5-scale MS-SSIM."""

from __future__ import annotations

import math
from typing import Union

import numpy as np
from scipy import ndimage

from ..volume import Volume
from .exceptions import DimensionMismatchError, InputTooSmallError

ArrayLike = Union[np.ndarray, Volume]

WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03
SCALE_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
MIN_MS_SSIM_SIZE = WINDOW_SIZE * 2 ** (len(SCALE_WEIGHTS) - 1)


def _as_array(value: ArrayLike) -> np.ndarray:
    data = value.voxels if isinstance(value, Volume) else value
    return np.asarray(data, dtype=np.float64)


def _pair(a: ArrayLike, b: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    left, right = _as_array(a), _as_array(b)
    if left.shape != right.shape:
        raise DimensionMismatchError(f"尺寸不一致: {left.shape} vs {right.shape}")
    return left, right


def psnr(a: ArrayLike, b: ArrayLike, peak: float = 1.0) -> float:
    """10·log10(peak² / MSE); identical inputs give +inf."""
    left, right = _pair(a, b)
    mse = float(np.mean((left - right) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _gaussian_taps() -> np.ndarray:
    offsets = np.arange(WINDOW_SIZE, dtype=np.float64) - WINDOW_SIZE // 2
    taps = np.exp(-(offsets**2) / (2.0 * WINDOW_SIGMA**2))
    return taps / taps.sum()


_TAPS = _gaussian_taps()


def _window_mean(image: np.ndarray) -> np.ndarray:
    """Separable Gaussian filter, keeping only fully covered ("valid") positions."""
    filtered = ndimage.correlate1d(image, _TAPS, axis=0, mode="constant")
    filtered = ndimage.correlate1d(filtered, _TAPS, axis=1, mode="constant")
    half = WINDOW_SIZE // 2
    return filtered[half:-half, half:-half]


def _scale_terms(x: np.ndarray, y: np.ndarray, c1: float, c2: float) -> tuple[float, float]:
    mu_x = _window_mean(x)
    mu_y = _window_mean(y)
    var_x = _window_mean(x * x) - mu_x * mu_x
    var_y = _window_mean(y * y) - mu_y * mu_y
    cov = _window_mean(x * y) - mu_x * mu_y
    luminance = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1)
    contrast_structure = (2.0 * cov + c2) / (var_x + var_y + c2)
    return float(np.mean(luminance)), float(np.mean(contrast_structure))


def _avg_pool(image: np.ndarray) -> np.ndarray:
    rows, cols = (image.shape[0] // 2) * 2, (image.shape[1] // 2) * 2
    cropped = image[:rows, :cols]
    return cropped.reshape(rows // 2, 2, cols // 2, 2).mean(axis=(1, 3))


def ms_ssim_slice(a: np.ndarray, b: np.ndarray, data_range: float = 1.0) -> float:
    x, y = _pair(a, b)
    if x.ndim != 2:
        raise DimensionMismatchError(f"ms_ssim_slice 需要二维输入，实际 ndim={x.ndim}")
    if min(x.shape) < MIN_MS_SSIM_SIZE:
        raise InputTooSmallError(f"MS-SSIM 需要至少 {MIN_MS_SSIM_SIZE}×{MIN_MS_SSIM_SIZE}，实际 {x.shape}")
    if np.array_equal(x, y):
        return 1.0

    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2
    value = 1.0
    last = len(SCALE_WEIGHTS) - 1
    for scale, weight in enumerate(SCALE_WEIGHTS):
        luminance, contrast_structure = _scale_terms(x, y, c1, c2)
        # cs clipped at 0
        value *= max(contrast_structure, 0.0) ** weight
        if scale == last:
            value *= max(luminance, 0.0) ** weight
        else:
            x, y = _avg_pool(x), _avg_pool(y)
    return float(min(max(value, 0.0), 1.0))


def ms_ssim(a: ArrayLike, b: ArrayLike, data_range: float = 1.0) -> float:
    """MS-SSIM of two slices, or the mean over slices for two volumes."""
    left, right = _pair(a, b)
    if left.ndim == 2:
        return ms_ssim_slice(left, right, data_range)
    if left.ndim != 3:
        raise DimensionMismatchError(f"ms_ssim 需要二维或三维输入，实际 ndim={left.ndim}")
    return float(np.mean([ms_ssim_slice(s, t, data_range) for s, t in zip(left, right)]))
