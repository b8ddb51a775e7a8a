"""Histogram of oriented gradients descriptor.

Gradients use centered differences with replicate borders. Each pixel votes
its gradient magnitude into the two orientation bins nearest its (by default
unsigned) gradient angle, accumulated per cell. Overlapping blocks of cells
are L2-Hys normalized and concatenated.
"""

from __future__ import annotations

import numpy as np

from ..base import Estimator, TransformerMixin
from ..errors import ParameterError
from ..validation import check_image, check_image_batch

L2_HYS_CLIP = 0.2
_NORM_EPS = 1e-12


def image_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered-difference gradients (gx, gy) with replicate borders."""
    h, w = img.shape
    gx = np.zeros_like(img)
    gy = np.zeros_like(img)
    if w >= 2:
        gx[:, 1:-1] = img[:, 2:] - img[:, :-2]
        gx[:, 0] = img[:, 1] - img[:, 0]
        gx[:, -1] = img[:, -1] - img[:, -2]
    if h >= 2:
        gy[1:-1, :] = img[2:, :] - img[:-2, :]
        gy[0, :] = img[1, :] - img[0, :]
        gy[-1, :] = img[-1, :] - img[-2, :]
    return gx, gy


class HogDescriptor(Estimator, TransformerMixin):
    """HOG feature extractor over square cells and overlapping blocks.

    Parameters
    ----------
    cell_side : pixels per cell edge; must divide both image sides.
    block_side : cells per block edge.
    n_bins : orientation histogram bins (>= 2).
    block_stride : block step in cells.
    signed_gradients : bin over [0, 360) instead of the default [0, 180).
    """

    def __init__(self, cell_side: int = 4, block_side: int = 2, n_bins: int = 9,
                 block_stride: int = 1, signed_gradients: bool = False):
        self.cell_side = cell_side
        self.block_side = block_side
        self.n_bins = n_bins
        self.block_stride = block_stride
        self.signed_gradients = signed_gradients

    def _check_geometry(self, h: int, w: int) -> tuple[int, int]:
        cs = int(self.cell_side)
        bs = int(self.block_side)
        stride = int(self.block_stride)
        if cs < 1:
            raise ParameterError(f"cell_side must be >= 1, got {cs}")
        if int(self.n_bins) < 2:
            raise ParameterError(f"n_bins must be >= 2, got {self.n_bins}")
        if stride < 1:
            raise ParameterError(f"block_stride must be >= 1, got {stride}")
        if h % cs or w % cs:
            raise ParameterError(
                f"cell_side {cs} must divide the image sides, got {h}x{w}")
        cells_y, cells_x = h // cs, w // cs
        if bs < 1 or bs > min(cells_y, cells_x):
            raise ParameterError(
                f"block_side {bs} must lie in [1, cells per side {min(cells_y, cells_x)}]")
        return cells_y, cells_x

    def output_dim(self, h: int, w: int) -> int:
        """Descriptor length for an h x w image, from the block geometry."""
        cells_y, cells_x = self._check_geometry(h, w)
        stride = int(self.block_stride)
        bs = int(self.block_side)
        blocks_y = (cells_y - bs) // stride + 1
        blocks_x = (cells_x - bs) // stride + 1
        return blocks_y * blocks_x * bs * bs * int(self.n_bins)

    def cell_histograms(self, img) -> np.ndarray:
        """Per-cell orientation histograms before block normalization.

        Returns a (cells_y, cells_x, n_bins) array of magnitude-weighted votes.
        """
        img = check_image(img)
        h, w = img.shape
        cells_y, cells_x = self._check_geometry(h, w)
        cs = int(self.cell_side)
        n_bins = int(self.n_bins)

        gx, gy = image_gradients(img)
        mag = np.hypot(gx, gy)
        period = 2.0 * np.pi if self.signed_gradients else np.pi
        ang = np.mod(np.arctan2(gy, gx), period)

        # soft orientation binning: split each vote between the two bins whose
        # centers bracket the angle, circularly
        pos = ang * (n_bins / period) - 0.5
        lower = np.floor(pos)
        frac = pos - lower
        lo_bin = lower.astype(np.int64) % n_bins
        hi_bin = (lo_bin + 1) % n_bins

        ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
        cell_idx = (ys // cs) * cells_x + (xs // cs)
        n_slots = cells_y * cells_x * n_bins
        hist = np.bincount((cell_idx * n_bins + lo_bin).ravel(),
                           weights=(mag * (1.0 - frac)).ravel(), minlength=n_slots)
        hist += np.bincount((cell_idx * n_bins + hi_bin).ravel(),
                            weights=(mag * frac).ravel(), minlength=n_slots)
        return hist.reshape(cells_y, cells_x, n_bins)

    def transform_one(self, img) -> np.ndarray:
        hist = self.cell_histograms(img)
        cells_y, cells_x, n_bins = hist.shape
        bs = int(self.block_side)
        stride = int(self.block_stride)
        blocks_y = (cells_y - bs) // stride + 1
        blocks_x = (cells_x - bs) // stride + 1
        out = np.empty(blocks_y * blocks_x * bs * bs * n_bins)
        size = bs * bs * n_bins
        pos = 0
        for by in range(blocks_y):
            for bx in range(blocks_x):
                block = hist[by * stride:by * stride + bs,
                             bx * stride:bx * stride + bs, :].ravel()
                out[pos:pos + size] = _l2_hys(block)
                pos += size
        return out

    def transform(self, X) -> np.ndarray:
        images = check_image_batch(X)
        return np.stack([self.transform_one(img) for img in images])


def _l2_hys(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm < _NORM_EPS:
        return np.zeros_like(v)
    v = v / norm
    np.minimum(v, L2_HYS_CLIP, out=v)
    return v / np.linalg.norm(v)
