"""Local binary patterns on a circular sampling ring.

Each interior pixel is compared against `neighbors` points sampled (with
bilinear value interpolation) on a circle of the given radius; the comparison
bits form an integer code. Pixels whose ring would leave the image get code 0.
"""

from __future__ import annotations

import numpy as np

from ..base import Estimator, TransformerMixin
from ..errors import ParameterError
from ..imaging import _sample_bilinear
from ..validation import check_image, check_image_batch

MODES = ("flat", "histogram")


def ring_offsets(neighbors: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """(dy, dx) sample offsets, counterclockwise from the +x axis."""
    angles = 2.0 * np.pi * np.arange(neighbors) / neighbors
    return radius * np.sin(angles), radius * np.cos(angles)


class LbpDescriptor(Estimator, TransformerMixin):
    """Local binary pattern extractor.

    Parameters
    ----------
    neighbors : ring sample count, 1..24 (codes fit an int64 comfortably).
    radius : ring radius in pixels; 2 * radius must be under the image side.
    mode : "flat" returns the code image scaled to [0, 1] and flattened;
        "histogram" returns a normalized 2**neighbors bin code histogram.
    """

    def __init__(self, neighbors: int = 10, radius: float = 3.0,
                 mode: str = "flat"):
        self.neighbors = neighbors
        self.radius = radius
        self.mode = mode

    def _check_params(self) -> tuple[int, float]:
        p = int(self.neighbors)
        r = float(self.radius)
        if not 1 <= p <= 24:
            raise ParameterError(f"neighbors must lie in [1, 24], got {p}")
        if r <= 0:
            raise ParameterError(f"radius must be positive, got {r}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        return p, r

    def code_image(self, img) -> np.ndarray:
        """Integer code per pixel, shape (h, w); border pixels get 0."""
        img = check_image(img)
        p, r = self._check_params()
        h, w = img.shape
        if 2.0 * r >= min(h, w):
            raise ParameterError(
                f"radius {r} too large for a {h}x{w} image (needs 2*radius < side)")
        dy, dx = ring_offsets(p, r)

        ys, xs = np.meshgrid(np.arange(h, dtype=np.float64),
                             np.arange(w, dtype=np.float64), indexing="ij")
        codes = np.zeros((h, w), dtype=np.int64)
        for k in range(p):
            sample = _sample_bilinear(img, ys + dy[k], xs + dx[k])
            codes |= (sample >= img).astype(np.int64) << k

        # ring leaves the image outside the interior band: emit 0 there
        lo = int(np.ceil(r))
        interior = np.zeros((h, w), dtype=bool)
        interior[lo:h - lo, lo:w - lo] = True
        codes[~interior] = 0
        return codes

    def transform_one(self, img) -> np.ndarray:
        p, _ = self._check_params()
        codes = self.code_image(img)
        n_codes = 1 << p
        if self.mode == "histogram":
            hist = np.bincount(codes.ravel(), minlength=n_codes).astype(np.float64)
            return hist / codes.size
        return codes.ravel().astype(np.float64) / (n_codes - 1)

    def transform(self, X) -> np.ndarray:
        images = check_image_batch(X)
        return np.stack([self.transform_one(img) for img in images])
