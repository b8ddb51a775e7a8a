"""Gabor filter bank response features.

The complex kernel is a sigma-isotropic Gaussian envelope times a plane wave
along the rotated x axis; sigma is tied to the spatial frequency bandwidth.
Images are convolved with the real part under reflect padding.
"""

from __future__ import annotations

import math

import numpy as np

from ..base import Estimator, TransformerMixin
from ..errors import ParameterError
from ..validation import check_image, check_image_batch


def bandwidth_sigma(frequency: float, bandwidth: float) -> float:
    """Envelope sigma for a given half-response spatial-frequency bandwidth."""
    ratio = (2.0 ** bandwidth + 1.0) / (2.0 ** bandwidth - 1.0)
    return (1.0 / (np.pi * frequency)) * math.sqrt(math.log(2.0) / 2.0) * ratio


def gabor_kernel(frequency: float = 0.9, theta: float = 0.0,
                 bandwidth: float = 1.0, n_stds: float = 3.0) -> np.ndarray:
    """Complex Gabor kernel, sized to cover n_stds envelope deviations."""
    if frequency <= 0:
        raise ParameterError(f"frequency must be positive, got {frequency}")
    if bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    if n_stds <= 0:
        raise ParameterError(f"n_stds must be positive, got {n_stds}")
    sigma = bandwidth_sigma(frequency, bandwidth)
    radius = int(math.ceil(n_stds * sigma))
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    x, y = np.meshgrid(coords, coords)
    rot_x = x * np.cos(theta) + y * np.sin(theta)
    rot_y = -x * np.sin(theta) + y * np.cos(theta)
    envelope = np.exp(-(rot_x ** 2 + rot_y ** 2) / (2.0 * sigma ** 2))
    return envelope * np.exp(1j * 2.0 * np.pi * frequency * rot_x)


def convolve2d_reflect(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-size 2-D convolution with reflect padding."""
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    padded = np.pad(img, ((ry, ry), (rx, rx)), mode="reflect")
    flipped = kernel[::-1, ::-1]
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            weight = flipped[i, j]
            if weight != 0.0:
                out += weight * padded[i:i + h, j:j + w]
    return out


class GaborDescriptor(Estimator, TransformerMixin):
    """Flattened real-part Gabor response of each image.

    Parameters
    ----------
    frequency : plane-wave spatial frequency in cycles per pixel.
    theta : filter orientation in radians.
    bandwidth : spatial-frequency bandwidth in octaves, controls sigma.
    n_stds : kernel support radius in envelope standard deviations.
    """

    def __init__(self, frequency: float = 0.9, theta: float = 0.0,
                 bandwidth: float = 1.0, n_stds: float = 3.0):
        self.frequency = frequency
        self.theta = theta
        self.bandwidth = bandwidth
        self.n_stds = n_stds

    def kernel(self) -> np.ndarray:
        return gabor_kernel(self.frequency, self.theta, self.bandwidth,
                            self.n_stds)

    def response(self, img) -> np.ndarray:
        """Real-part filter response at the input size."""
        img = check_image(img)
        return convolve2d_reflect(img, self.kernel().real)

    def transform_one(self, img) -> np.ndarray:
        return self.response(img).ravel()

    def transform(self, X) -> np.ndarray:
        images = check_image_batch(X)
        return np.stack([self.transform_one(img) for img in images])
