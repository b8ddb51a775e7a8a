"""Grayscale image preprocessing: conversion, resize, denoise, deskew.

All functions take and return 2-D float64 arrays with intensities in [0, 1].
8-bit inputs are expected to be divided by 255 at ingestion (see datasets).
"""

from __future__ import annotations

import math

import numpy as np

from .base import Estimator, TransformerMixin
from .errors import ParameterError, ShapeError
from .validation import check_image, check_image_batch, check_positive

GRAY_WEIGHTS = (0.299, 0.587, 0.114)  # ITU-R BT.601 luma


def to_grayscale(rgb) -> np.ndarray:
    """Convert an (H, W, 3) array with channels in [0, 1] to grayscale luminance."""
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"expected an (H, W, 3) array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError("image must have at least one pixel")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ShapeError("channel values must lie in [0, 1]")
    r, g, b = GRAY_WEIGHTS
    # summed in the one association order where the weights total exactly 1.0,
    # so pure white maps to 1.0 with no rounding residue
    out = r * arr[:, :, 0] + b * arr[:, :, 2] + g * arr[:, :, 1]
    return np.clip(out, 0.0, 1.0)


def _sample_bilinear(img: np.ndarray, ys: np.ndarray, xs: np.ndarray,
                     fill: float | None = None) -> np.ndarray:
    """Sample img at fractional (ys, xs).

    With fill=None coordinates are clamped to the borders; otherwise samples
    whose 2x2 support exits the image blend toward ``fill``. The incremental
    form (base + fraction * difference) is exact for constant neighborhoods.
    """
    h, w = img.shape
    if fill is None:
        ys = np.clip(ys, 0.0, h - 1.0)
        xs = np.clip(xs, 0.0, w - 1.0)
        y0 = np.floor(ys).astype(np.intp)
        x0 = np.floor(xs).astype(np.intp)
        y1 = np.minimum(y0 + 1, h - 1)
        x1 = np.minimum(x0 + 1, w - 1)
        fy = ys - y0
        fx = xs - x0
        v00 = img[y0, x0]
        v01 = img[y0, x1]
        v10 = img[y1, x0]
        v11 = img[y1, x1]
    else:
        y0 = np.floor(ys).astype(np.intp)
        x0 = np.floor(xs).astype(np.intp)
        fy = ys - y0
        fx = xs - x0

        def at(yy, xx):
            inside = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
            vals = np.full(yy.shape, fill, dtype=np.float64)
            vals[inside] = img[yy[inside], xx[inside]]
            return vals

        v00 = at(y0, x0)
        v01 = at(y0, x0 + 1)
        v10 = at(y0 + 1, x0)
        v11 = at(y0 + 1, x0 + 1)
    top = v00 + fx * (v01 - v00)
    bot = v10 + fx * (v11 - v10)
    return top + fy * (bot - top)


def resize_bilinear(img, out_h: int, out_w: int) -> np.ndarray:
    """Resize with bilinear interpolation, half-pixel center alignment.

    Destination pixel centers map to source coordinates
    ``src = (dst + 0.5) * (in_size / out_size) - 0.5``, clamped to the borders.
    """
    img = check_image(img)
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"target dimensions must be >= 1, got {out_h}x{out_w}")
    h, w = img.shape
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    out = _sample_bilinear(img, yy, xx, fill=None)
    return np.clip(out, 0.0, 1.0)


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Discrete Gaussian of radius ceil(3*sigma), normalized to sum 1."""
    sigma = check_positive(sigma, "sigma")
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def gaussian_blur(img, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution with reflect padding; shape is preserved."""
    img = check_image(img)
    kernel = gaussian_kernel_1d(sigma)
    radius = (len(kernel) - 1) // 2
    padded = np.pad(img, radius, mode="reflect")
    h, w = img.shape
    # columns then rows; a normalized separable kernel keeps constants exact
    tmp = np.zeros((h + 2 * radius, w), dtype=np.float64)
    for k, wk in enumerate(kernel):
        tmp += wk * padded[:, k:k + w]
    out = np.zeros((h, w), dtype=np.float64)
    for k, wk in enumerate(kernel):
        out += wk * tmp[k:k + h, :]
    return np.clip(out, 0.0, 1.0)


def intensity_skew(img) -> float:
    """Second-order moment skew mu11/mu02 of the intensity distribution."""
    img = check_image(img)
    total = img.sum()
    if total <= 1e-12:
        return 0.0
    h, w = img.shape
    ys = np.arange(h, dtype=np.float64)[:, None]
    xs = np.arange(w, dtype=np.float64)[None, :]
    cy = (ys * img).sum() / total
    cx = (xs * img).sum() / total
    mu11 = ((xs - cx) * (ys - cy) * img).sum()
    mu02 = (((ys - cy) ** 2) * img).sum()
    if mu02 < 1e-12:
        return 0.0
    return float(mu11 / mu02)


def deskew(img) -> np.ndarray:
    """Remove glyph slant by a moment-based horizontal shear.

    The shear x' = x - skew * (y - centroid_y) cancels the measured skew:
    positive skew shears columns one way, negative the other. Resampling is
    bilinear with zero fill; an all-zero image passes through unchanged.
    """
    img = check_image(img)
    skew = intensity_skew(img)
    if skew == 0.0:
        return img.copy()
    h, w = img.shape
    total = img.sum()
    ys = np.arange(h, dtype=np.float64)[:, None]
    cy = (ys * img).sum() / total
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    src_x = xx + skew * (yy - cy)
    out = _sample_bilinear(img, yy, src_x, fill=0.0)
    return np.clip(out, 0.0, 1.0)


class Preprocessor(Estimator, TransformerMixin):
    """Digit image pipeline: resize to a square side, Gaussian denoise, deskew.

    Stateless; ``transform`` maps a batch of [0, 1] grayscale images of any
    size to an (n, target_side, target_side) array.
    """

    def __init__(self, target_side: int = 28, gaussian_sigma: float = 0.8,
                 deskew_enabled: bool = True):
        self.target_side = target_side
        self.gaussian_sigma = gaussian_sigma
        self.deskew_enabled = deskew_enabled

    def _check_params(self) -> None:
        if int(self.target_side) < 8:
            raise ParameterError(f"target_side must be >= 8, got {self.target_side}")
        check_positive(self.gaussian_sigma, "gaussian_sigma")

    def transform_one(self, img) -> np.ndarray:
        self._check_params()
        side = int(self.target_side)
        out = resize_bilinear(img, side, side)
        out = gaussian_blur(out, self.gaussian_sigma)
        if self.deskew_enabled:
            out = deskew(out)
        return out

    def transform(self, images) -> np.ndarray:
        self._check_params()
        batch = check_image_batch(images)
        out = np.empty((len(batch), int(self.target_side), int(self.target_side)))
        for i, img in enumerate(batch):
            try:
                out[i] = self.transform_one(img)
            except (ShapeError, ParameterError) as exc:
                raise type(exc)(f"image {i}: {exc}") from exc
        return out
