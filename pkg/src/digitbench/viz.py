"""Plain-PGM rendering of images and feature-space views.

``visualize`` writes exactly three files per call: the original image, its
preprocessed form, and a feature rendering. HOG becomes a grid of oriented
line glyphs (one per cell, line strength tracking bin weight), LBP becomes
its code image, Gabor the filter response; raw repeats the preprocessed
image.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ParseError, ShapeError
from .features import GABOR, HOG, LBP, RAW, make_descriptor
from .imaging import Preprocessor
from .validation import check_image

_HOG_CELL_PIXELS = 16


def write_pgm(path, img: np.ndarray) -> None:
    """Write a [0, 1] grayscale image as ASCII PGM (P2, maxval 255)."""
    img = check_image(img)
    levels = np.clip(np.rint(img * 255.0), 0, 255).astype(int)
    h, w = levels.shape
    lines = [f"{' '.join(str(v) for v in row)}" for row in levels]
    with open(path, "w") as fh:
        fh.write(f"P2\n{w} {h}\n255\n" + "\n".join(lines) + "\n")


def read_pgm(path) -> np.ndarray:
    """Read an ASCII PGM (P2) back into a [0, 1] image."""
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P2":
        raise ParseError(f"{path}: not an ASCII PGM (P2) file")
    try:
        w, h, maxval = (int(t) for t in tokens[1:4])
        values = np.array([int(t) for t in tokens[4:]], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: malformed PGM data") from exc
    if maxval < 1 or values.size != w * h:
        raise ParseError(
            f"{path}: expected {w * h} pixel values, got {values.size}")
    return values.reshape(h, w) / maxval


def _draw_line(canvas: np.ndarray, cy: float, cx: float, angle: float,
               half_len: float, strength: float) -> None:
    # sample the segment densely; additive so crossing lines brighten
    steps = max(int(half_len * 4), 2)
    ts = np.linspace(-half_len, half_len, steps)
    ys = np.clip(np.rint(cy + ts * np.sin(angle)), 0,
                 canvas.shape[0] - 1).astype(int)
    xs = np.clip(np.rint(cx + ts * np.cos(angle)), 0,
                 canvas.shape[1] - 1).astype(int)
    canvas[ys, xs] = np.maximum(canvas[ys, xs], strength)


def render_hog(img: np.ndarray, descriptor) -> np.ndarray:
    """Oriented-line glyph per cell; line direction shows the edge, not the
    gradient, so strokes align with the strokes of the glyph itself."""
    hists = descriptor.cell_histograms(check_image(img))
    cells_y, cells_x, n_bins = hists.shape
    peak = hists.max()
    if peak > 0:
        hists = hists / peak
    side = _HOG_CELL_PIXELS
    canvas = np.zeros((cells_y * side, cells_x * side))
    period = np.pi if not descriptor.signed_gradients else 2 * np.pi
    for cy in range(cells_y):
        for cx in range(cells_x):
            for b in range(n_bins):
                w = hists[cy, cx, b]
                if w <= 0:
                    continue
                ang = (b + 0.5) * period / n_bins + np.pi / 2.0
                _draw_line(canvas, cy * side + side / 2 - 0.5,
                           cx * side + side / 2 - 0.5, ang,
                           side / 2 - 1.0, w)
    return canvas


def render_lbp(img: np.ndarray, descriptor) -> np.ndarray:
    codes = descriptor.code_image(check_image(img))
    return codes / float(2 ** int(descriptor.neighbors) - 1)


def render_gabor(img: np.ndarray, descriptor) -> np.ndarray:
    response = descriptor.response(check_image(img))
    lo, hi = response.min(), response.max()
    if hi - lo < 1e-12:
        return np.zeros_like(response)
    return (response - lo) / (hi - lo)


def render_feature(img: np.ndarray, method: str, params=None) -> np.ndarray:
    """Feature-space view of one preprocessed image."""
    desc = make_descriptor(method, params)
    if method == HOG:
        return render_hog(img, desc)
    if method == LBP:
        return render_lbp(img, desc)
    if method == GABOR:
        return render_gabor(img, desc)
    return check_image(img).copy()


def visualize(img, method: str = HOG, params=None, out_dir=".",
              stem: str = "digit", pre: Preprocessor | None = None):
    """Write original, preprocessed, and feature views; returns the 3 paths."""
    img = check_image(img)
    if pre is None:
        pre = Preprocessor()
    processed = pre.transform_one(img)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for tag, view in (("original", img), ("preprocessed", processed),
                      (method, render_feature(processed, method, params))):
        path = os.path.join(out_dir, f"{stem}-{tag}.pgm")
        write_pgm(path, view)
        paths.append(path)
    return paths
