"""Digit dataset handling: CSV loading, stratified splits, synthetic sets.

CSV rows hold one image each as ``side*side + 1`` numeric fields with the
label in the first or last position. Pixel scale is auto-detected: files in
8-bit range are divided by 255. Splits are seeded and stratified by default,
with round-half-up per-class train counts. Two deterministic synthetic
generators stand in for real digit scans where none are available.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ParseError, ShapeError, SplitError
from .imaging import Preprocessor, _sample_bilinear, gaussian_blur

LABEL_FIRST = "label_first"
LABEL_LAST = "label_last"
SCHEMAS = (LABEL_FIRST, LABEL_LAST)

N_CLASSES = 10
CACHE_VERSION = 1


@dataclass
class LabeledDataset:
    """Feature matrix plus aligned labels and provenance tags."""

    features: np.ndarray
    labels: np.ndarray
    source: str = "unknown"
    feature_method: str = "raw"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ShapeError(
                f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.features.shape[0]:
            raise ShapeError(
                f"labels must align with feature rows: {self.labels.shape} "
                f"vs {self.features.shape}")
        if self.labels.size and not (0 <= self.labels.min()
                                     and self.labels.max() < N_CLASSES):
            raise ShapeError(f"labels must lie in [0, {N_CLASSES})")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


@dataclass
class SplitSpec:
    """How to cut a dataset into train and test parts."""

    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        frac = float(self.train_fraction)
        if not 0.0 < frac < 1.0:
            raise ParameterError(
                f"train_fraction must lie in (0, 1), got {frac}")


def file_digest(path) -> str:
    """Hex SHA-256 of the file contents."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_csv_rows(path, n_fields: int):
    """Line-by-line parse with 1-based row numbers in every error.

    A single leading row that does not parse as numbers is treated as a
    header and skipped.
    """
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                values = [float(p) for p in parts]
            except ValueError:
                if lineno == 1:
                    continue
                raise ParseError(
                    f"row {lineno}: non-numeric field") from None
            if len(values) != n_fields:
                raise ParseError(
                    f"row {lineno}: expected {n_fields} fields, "
                    f"got {len(values)}")
            rows.append((lineno, values))
    if not rows:
        raise ParseError("no data rows found")
    return rows


def load_csv(path, schema: str = LABEL_FIRST, side: int = 28):
    """Read an image-per-row digit CSV into ((n, side, side) images, labels).

    Values are scaled to [0, 1]; 8-bit files are detected by their maximum
    exceeding 1. Labels outside [0, 9], ragged rows, and non-numeric fields
    raise a parse error naming the offending row.
    """
    if schema not in SCHEMAS:
        raise ParameterError(f"schema must be one of {SCHEMAS}, got {schema!r}")
    side = int(side)
    if side < 1:
        raise ParameterError(f"side must be >= 1, got {side}")
    n_fields = side * side + 1
    rows = _parse_csv_rows(path, n_fields)
    linenos = np.array([r[0] for r in rows])
    data = np.array([r[1] for r in rows])
    if schema == LABEL_FIRST:
        labels, pixels = data[:, 0], data[:, 1:]
    else:
        labels, pixels = data[:, -1], data[:, :-1]
    bad = (labels != np.floor(labels)) | (labels < 0) | (labels >= N_CLASSES)
    if np.any(bad):
        at = int(np.argmax(bad))
        raise ParseError(
            f"row {linenos[at]}: label {labels[at]:g} "
            f"outside [0, {N_CLASSES - 1}]")
    bad = (pixels < 0) | (pixels > 255)
    if np.any(bad):
        at = np.argwhere(bad)[0]
        raise ParseError(
            f"row {linenos[at[0]]}: pixel value {pixels[at[0], at[1]]} "
            f"outside [0, 255]")
    if pixels.size and pixels.max() > 1.0:
        pixels = pixels / 255.0
    return pixels.reshape(-1, side, side), labels.astype(np.int64)


def preprocess_all(images, pre: Preprocessor | None = None,
                   jobs: int = 1) -> np.ndarray:
    """Run the imaging pipeline over a batch, order preserved.

    Failures carry the image index. ``jobs`` > 1 fans out per image; the
    result is identical at any parallelism.
    """
    if pre is None:
        pre = Preprocessor()
    if int(jobs) <= 1:
        return pre.transform(images)

    def one(pair):
        i, img = pair
        try:
            return pre.transform_one(np.asarray(img, dtype=np.float64))
        except (ShapeError, ParameterError) as exc:
            raise type(exc)(f"image {i}: {exc}") from exc

    with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
        out = list(pool.map(one, enumerate(images)))
    return np.stack(out)


def split_indices(labels, spec: SplitSpec):
    """Seeded train/test index arrays (each sorted ascending).

    Stratified mode draws round-half-up ``train_fraction`` of every class;
    classes with fewer than two samples cannot be stratified.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n < 2:
        raise SplitError(f"need at least 2 samples to split, got {n}")
    rng = np.random.default_rng(int(spec.seed))
    frac = float(spec.train_fraction)
    if not spec.stratified:
        perm = rng.permutation(n)
        n_train = int(np.floor(frac * n + 0.5))
        return np.sort(perm[:n_train]), np.sort(perm[n_train:])
    train_parts, test_parts = [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.shape[0] < 2:
            raise SplitError(
                f"class {cls} has {idx.shape[0]} sample(s); stratified "
                f"splitting needs at least 2")
        perm = rng.permutation(idx)
        n_train = int(np.floor(frac * idx.shape[0] + 0.5))
        train_parts.append(perm[:n_train])
        test_parts.append(perm[n_train:])
    return (np.sort(np.concatenate(train_parts)),
            np.sort(np.concatenate(test_parts)))


def split(ds: LabeledDataset, spec: SplitSpec):
    """Partition a dataset into (train, test) per the split spec."""
    train_idx, test_idx = split_indices(ds.labels, spec)

    def take(idx):
        return LabeledDataset(ds.features[idx], ds.labels[idx],
                              source=ds.source,
                              feature_method=ds.feature_method)

    return take(train_idx), take(test_idx)


# seven-segment layout: (row_start, row_stop, col_start, col_stop) on a
# 28-pixel canvas, two-pixel stroke
_SEGMENTS = {
    "top": (4, 6, 8, 20),
    "mid": (13, 15, 8, 20),
    "bottom": (22, 24, 8, 20),
    "top_left": (4, 14, 8, 10),
    "top_right": (4, 14, 18, 20),
    "bottom_left": (14, 24, 8, 10),
    "bottom_right": (14, 24, 18, 20),
}

_DIGIT_SEGMENTS = {
    0: ("top", "top_left", "top_right", "bottom_left", "bottom_right",
        "bottom"),
    1: ("top_right", "bottom_right"),
    2: ("top", "top_right", "mid", "bottom_left", "bottom"),
    3: ("top", "top_right", "mid", "bottom_right", "bottom"),
    4: ("top_left", "top_right", "mid", "bottom_right"),
    5: ("top", "top_left", "mid", "bottom_right", "bottom"),
    6: ("top", "top_left", "mid", "bottom_left", "bottom_right", "bottom"),
    7: ("top", "top_right", "bottom_right"),
    8: ("top", "top_left", "top_right", "mid", "bottom_left", "bottom_right",
        "bottom"),
    9: ("top", "top_left", "top_right", "mid", "bottom_right", "bottom"),
}


def glyph_template(digit: int, side: int = 28) -> np.ndarray:
    """Clean seven-segment rendering of a digit, white on black."""
    if digit not in _DIGIT_SEGMENTS:
        raise ParameterError(f"digit must lie in [0, 9], got {digit}")
    scale = side / 28.0
    img = np.zeros((side, side))
    for name in _DIGIT_SEGMENTS[digit]:
        r0, r1, c0, c1 = (int(round(v * scale)) for v in _SEGMENTS[name])
        img[r0:r1, c0:c1] = 1.0
    return img


def _warp_affine(img: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Inverse-map an affine transform about the image centre."""
    h, w = img.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h) - cy, np.arange(w) - cx, indexing="ij")
    src_y = mat[0, 0] * yy + mat[0, 1] * xx + mat[0, 2] + cy
    src_x = mat[1, 0] * yy + mat[1, 1] * xx + mat[1, 2] + cx
    return _sample_bilinear(img, src_y, src_x, fill=0.0)


def synthetic_glyphs(n_samples: int = 2000, seed: int = 0, side: int = 28,
                     noise: float = 0.12):
    """Digit-glyph image set with affine, exposure, and pixel-noise jitter.

    Balanced over the ten classes (remainder goes to the low digits),
    deterministic for a given (n_samples, seed, side, noise). Per-image
    contrast and brightness vary so scans of different exposure coexist.
    """
    if int(n_samples) < 1:
        raise ParameterError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(int(seed))
    templates = [glyph_template(d, side) for d in range(N_CLASSES)]
    labels = np.arange(int(n_samples)) % N_CLASSES
    images = np.empty((int(n_samples), side, side))
    for i, digit in enumerate(labels):
        angle = rng.uniform(-0.18, 0.18)
        shear = rng.uniform(-0.18, 0.18)
        sy, sx = rng.uniform(0.85, 1.15, size=2)
        ty, tx = rng.uniform(-2.0, 2.0, size=2)
        cos, sin = np.cos(angle), np.sin(angle)
        # inverse map: rotation+shear composed with per-axis scale, then shift
        mat = np.array([[cos / sy, -sin / sy, ty],
                        [(sin + shear * cos) / sx,
                         (cos - shear * sin) / sx, tx]])
        img = _warp_affine(templates[digit], mat)
        img = gaussian_blur(img, 0.6)
        contrast = rng.uniform(0.55, 1.0)
        brightness = rng.uniform(0.0, 0.15)
        img = contrast * img + brightness + rng.normal(0.0, noise, img.shape)
        images[i] = np.clip(img, 0.0, 1.0)
    return images, labels.astype(np.int64)


def synthetic_squares(n_samples: int = 200, seed: int = 0, side: int = 28):
    """Two-class toy set: filled squares (0) versus hollow squares (1).

    Near-centred with small size and position jitter, so every reasonable
    feature/classifier pairing separates the classes.
    """
    if int(n_samples) < 1:
        raise ParameterError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(int(seed))
    labels = np.arange(int(n_samples)) % 2
    images = np.zeros((int(n_samples), side, side))
    centre = (side - 14) // 2
    for i, hollow in enumerate(labels):
        size = int(rng.integers(13, 16))
        r0 = centre + int(rng.integers(-2, 3))
        c0 = centre + int(rng.integers(-2, 3))
        images[i, r0:r0 + size, c0:c0 + size] = 1.0
        if hollow:
            images[i, r0 + 3:r0 + size - 3, c0 + 3:c0 + size - 3] = 0.0
        images[i] = np.clip(
            images[i] + rng.normal(0.0, 0.02, (side, side)), 0.0, 1.0)
    return images, labels.astype(np.int64)


def feature_cache_path(cache_dir, digest: str, method: str, params: dict):
    """Deterministic cache file name for one (dataset, extractor) pairing."""
    key = json.dumps({"digest": digest, "method": method,
                      "params": params, "version": CACHE_VERSION},
                     sort_keys=True)
    tag = hashlib.sha256(key.encode()).hexdigest()[:16]
    return os.path.join(cache_dir, f"features-{method}-{tag}.npz")


def save_feature_cache(path, features: np.ndarray, labels: np.ndarray):
    np.savez(path, version=np.array(CACHE_VERSION), features=features,
             labels=labels)


def load_feature_cache(path):
    """(features, labels) or None when absent or from another version."""
    if not os.path.exists(path):
        return None
    with np.load(path, allow_pickle=False) as data:
        if "version" not in data or int(data["version"]) != CACHE_VERSION:
            return None
        return data["features"], data["labels"]
