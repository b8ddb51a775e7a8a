import math

import numpy as np
import pytest

from digitbench import ParameterError, ShapeError
from digitbench.features import (
    FeatureVector,
    GaborDescriptor,
    HogDescriptor,
    LbpDescriptor,
    RawDescriptor,
    bandwidth_sigma,
    convolve2d_reflect,
    extract,
    extract_batch,
    gabor_kernel,
    image_gradients,
    make_descriptor,
)


def hog_cell_oracle(img, cell=4, n_bins=9):
    # per-pixel reimplementation: replicate-border centered differences,
    # unsigned angle, split each magnitude vote across the two nearest bins
    h, w = img.shape
    cells = np.zeros((h // cell, w // cell, n_bins))
    for y in range(h):
        for x in range(w):
            gx = img[y, min(x + 1, w - 1)] - img[y, max(x - 1, 0)]
            gy = img[min(y + 1, h - 1), x] - img[max(y - 1, 0), x]
            mag = math.hypot(gx, gy)
            ang = math.atan2(gy, gx) % math.pi
            pos = ang * n_bins / math.pi - 0.5
            lo = math.floor(pos)
            frac = pos - lo
            cells[y // cell, x // cell, int(lo) % n_bins] += mag * (1 - frac)
            cells[y // cell, x // cell, (int(lo) + 1) % n_bins] += mag * frac
    return cells


def lbp_oracle(img, p, r):
    h, w = img.shape
    codes = np.zeros((h, w), dtype=int)
    lo = math.ceil(r)
    for y in range(h):
        for x in range(w):
            if not (lo <= y < h - lo and lo <= x < w - lo):
                continue
            code = 0
            for k in range(p):
                a = 2 * math.pi * k / p
                sy = y + r * math.sin(a)
                sx = x + r * math.cos(a)
                y0, x0 = int(math.floor(sy)), int(math.floor(sx))
                fy, fx = sy - y0, sx - x0
                y0 = min(max(y0, 0), h - 1)
                x0 = min(max(x0, 0), w - 1)
                y1, x1 = min(y0 + 1, h - 1), min(x0 + 1, w - 1)
                top = img[y0, x0] + fx * (img[y0, x1] - img[y0, x0])
                bot = img[y1, x0] + fx * (img[y1, x1] - img[y1, x0])
                if top + fy * (bot - top) >= img[y, x]:
                    code |= 1 << k
            codes[y, x] = code
    return codes


def conv_oracle(img, kernel):
    # literal convolution sum out(y,x) = sum_k K[k] * img(y-k) on reflect pad
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    padded = np.pad(img, ((ry, ry), (rx, rx)), mode="reflect")
    h, w = img.shape
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for i in range(-ry, ry + 1):
                for j in range(-rx, rx + 1):
                    acc += kernel[i + ry, j + rx] * padded[y + ry - i, x + rx - j]
            out[y, x] = acc
    return out


class TestHog:
    def test_default_dim(self):
        img = np.random.default_rng(0).random((28, 28))
        desc = HogDescriptor()
        assert desc.output_dim(28, 28) == 1296
        assert desc.transform_one(img).shape == (1296,)

    def test_dim_formula_other_geometries(self):
        for side, cell, block, stride, bins in [(28, 7, 2, 1, 6), (32, 4, 2, 2, 9),
                                                (16, 4, 4, 1, 5), (24, 4, 3, 2, 9)]:
            desc = HogDescriptor(cell_side=cell, block_side=block, n_bins=bins,
                                 block_stride=stride)
            cells = side // cell
            blocks = (cells - block) // stride + 1
            want = blocks * blocks * block * block * bins
            assert desc.output_dim(side, side) == want
            img = np.random.default_rng(1).random((side, side))
            assert desc.transform_one(img).shape == (want,)

    def test_zero_and_constant_images(self):
        desc = HogDescriptor()
        assert np.array_equal(desc.transform_one(np.zeros((28, 28))),
                              np.zeros(1296))
        assert np.array_equal(desc.transform_one(np.full((28, 28), 0.7)),
                              np.zeros(1296))

    def test_block_norms(self):
        rng = np.random.default_rng(2)
        desc = HogDescriptor()
        v = desc.transform_one(rng.random((28, 28)))
        assert v.min() >= 0.0
        for b in v.reshape(36, 36):
            n = np.linalg.norm(b)
            assert n <= 1.0 + 1e-9
            assert n == pytest.approx(1.0, abs=1e-9) or n == 0.0

    def test_cell_histograms_match_oracle(self):
        rng = np.random.default_rng(3)
        img = rng.random((12, 12))
        got = HogDescriptor().cell_histograms(img)
        assert np.allclose(got, hog_cell_oracle(img, cell=4, n_bins=9), atol=1e-12)

    def test_vertical_edge_votes_horizontal_gradient_bin(self):
        # left half dark, right half bright: gradient points along +x, angle 0
        img = np.zeros((12, 12))
        img[:, 6:] = 1.0
        cells = HogDescriptor().cell_histograms(img)
        oracle = hog_cell_oracle(img)
        assert np.allclose(cells, oracle, atol=1e-12)
        total = cells.sum(axis=(0, 1))
        # angle 0 sits halfway between the wrap pair of bins (centers at
        # +-pi/18 for 9 unsigned bins), so the vote splits across bins 0 and 8
        assert set(np.nonzero(total)[0]) == {0, 8}

    def test_translation_moves_cell_histograms(self):
        img = np.zeros((28, 28))
        img[9:12, 9:12] = 1.0
        shifted = np.zeros((28, 28))
        shifted[9:12, 13:16] = 1.0  # one cell width to the right
        a = HogDescriptor().cell_histograms(img)
        b = HogDescriptor().cell_histograms(shifted)
        assert np.allclose(a[1:5, 1:5], b[1:5, 2:6], atol=1e-12)

    def test_geometry_errors(self):
        img = np.random.default_rng(4).random((28, 28))
        with pytest.raises(ParameterError):
            HogDescriptor(cell_side=5).transform_one(img)
        with pytest.raises(ParameterError):
            HogDescriptor(block_side=8).transform_one(img)
        with pytest.raises(ParameterError):
            HogDescriptor(n_bins=1).transform_one(img)
        with pytest.raises(ParameterError):
            HogDescriptor(block_stride=0).transform_one(img)

    def test_gradients_replicate_borders(self):
        rng = np.random.default_rng(5)
        img = rng.random((6, 7))
        gx, gy = image_gradients(img)
        assert gx[2, 0] == img[2, 1] - img[2, 0]
        assert gx[2, 6] == img[2, 6] - img[2, 5]
        assert gy[0, 3] == img[1, 3] - img[0, 3]
        assert gx[3, 4] == img[3, 5] - img[3, 3]

    def test_deterministic(self):
        rng = np.random.default_rng(6)
        img = rng.random((28, 28))
        a = HogDescriptor().transform_one(img)
        b = HogDescriptor().transform_one(img)
        assert a.tobytes() == b.tobytes()


class TestLbp:
    def test_code_range_and_border(self):
        rng = np.random.default_rng(7)
        desc = LbpDescriptor()
        for _ in range(5):
            codes = desc.code_image(rng.random((28, 28)))
            assert codes.min() >= 0 and codes.max() <= 1023
            border = np.ones((28, 28), dtype=bool)
            border[3:25, 3:25] = False
            assert np.all(codes[border] == 0)

    def test_constant_image_interior_all_ones(self):
        codes = LbpDescriptor().code_image(np.full((28, 28), 0.4))
        assert np.all(codes[3:25, 3:25] == 1023)

    def test_center_peak_gives_zero(self):
        img = np.full((9, 9), 0.2)
        img[4, 4] = 0.9
        codes = LbpDescriptor(neighbors=8, radius=1.0).code_image(img)
        assert codes[4, 4] == 0

    def test_matches_oracle_9x9(self):
        rng = np.random.default_rng(8)
        img = rng.random((9, 9))
        got = LbpDescriptor(neighbors=8, radius=1.0).code_image(img)
        assert np.array_equal(got, lbp_oracle(img, 8, 1.0))

    def test_matches_oracle_defaults(self):
        rng = np.random.default_rng(9)
        img = rng.random((14, 14))
        got = LbpDescriptor().code_image(img)
        assert np.array_equal(got, lbp_oracle(img, 10, 3.0))

    def test_monotone_remap_binary_images(self):
        rng = np.random.default_rng(10)
        desc = LbpDescriptor()
        for _ in range(10):
            img = (rng.random((16, 16)) > 0.5) * 0.6
            remapped = np.sqrt(img) * 0.9 + 0.05  # strictly monotone on values
            assert np.array_equal(desc.code_image(img), desc.code_image(remapped))

    def test_affine_remap_any_image(self):
        rng = np.random.default_rng(11)
        desc = LbpDescriptor()
        for _ in range(10):
            img = rng.random((16, 16))
            assert np.array_equal(desc.code_image(img),
                                  desc.code_image(0.5 * img + 0.25))

    def test_flat_mode(self):
        rng = np.random.default_rng(12)
        img = rng.random((28, 28))
        desc = LbpDescriptor()
        flat = desc.transform_one(img)
        assert flat.shape == (784,)
        assert np.array_equal(flat, desc.code_image(img).ravel() / 1023.0)
        assert flat.min() >= 0.0 and flat.max() <= 1.0

    def test_histogram_mode(self):
        rng = np.random.default_rng(13)
        img = rng.random((28, 28))
        hist = LbpDescriptor(mode="histogram").transform_one(img)
        assert hist.shape == (1024,)
        assert hist.sum() == pytest.approx(1.0, abs=1e-12)
        codes = LbpDescriptor().code_image(img)
        counts = np.bincount(codes.ravel(), minlength=1024)
        assert np.array_equal(hist, counts / codes.size)

    def test_param_errors(self):
        img = np.random.default_rng(14).random((10, 10))
        with pytest.raises(ParameterError):
            LbpDescriptor(radius=5.0).code_image(img)
        with pytest.raises(ParameterError):
            LbpDescriptor(neighbors=0).code_image(img)
        with pytest.raises(ParameterError):
            LbpDescriptor(neighbors=25).code_image(img)
        with pytest.raises(ParameterError):
            LbpDescriptor(mode="both").transform_one(img)


class TestGabor:
    def test_sigma_formula(self):
        assert bandwidth_sigma(0.9, 1.0) == pytest.approx(0.624635417097592,
                                                          abs=1e-15)

    def test_kernel_shape_center_and_sum(self):
        k = gabor_kernel(frequency=0.9, bandwidth=1.0, theta=0.0, n_stds=3.0)
        assert k.shape == (5, 5)
        assert k[2, 2] == 1.0 + 0.0j
        assert k.real.sum() == pytest.approx(2.27683387754367, abs=1e-12)

    def test_conjugate_symmetry_theta_zero(self):
        k = gabor_kernel(theta=0.0)
        assert np.allclose(k[:, ::-1], np.conj(k), atol=1e-15)

    def test_theta_quarter_turn_transposes(self):
        a = gabor_kernel(theta=0.0)
        b = gabor_kernel(theta=np.pi / 2)
        assert np.allclose(b, a.T, atol=1e-12)

    def test_constant_image_dc_response(self):
        k = gabor_kernel()
        c = 0.37
        resp = GaborDescriptor().response(np.full((28, 28), c))
        assert np.allclose(resp, c * k.real.sum(), atol=1e-12)

    def test_zero_image(self):
        assert np.array_equal(GaborDescriptor().transform_one(np.zeros((28, 28))),
                              np.zeros(784))

    def test_linearity(self):
        rng = np.random.default_rng(15)
        desc = GaborDescriptor()
        for _ in range(5):
            x = rng.random((28, 28))
            y = rng.random((28, 28))
            a, b = rng.uniform(0.0, 0.5, size=2)
            lhs = desc.response(a * x + b * y)
            rhs = a * desc.response(x) + b * desc.response(y)
            assert np.allclose(lhs, rhs, atol=1e-9)

    def test_convolution_matches_literal_sum(self):
        rng = np.random.default_rng(16)
        img = rng.random((10, 11))
        kernel = rng.random((5, 3))
        assert np.allclose(convolve2d_reflect(img, kernel),
                           conv_oracle(img, kernel), atol=1e-12)

    def test_output_dim(self):
        img = np.random.default_rng(17).random((28, 28))
        assert GaborDescriptor().transform_one(img).shape == (784,)

    def test_param_errors(self):
        with pytest.raises(ParameterError):
            gabor_kernel(frequency=0.0)
        with pytest.raises(ParameterError):
            gabor_kernel(bandwidth=-1.0)


class TestDispatch:
    def test_extract_tags_method(self):
        img = np.random.default_rng(18).random((28, 28))
        fv = extract(img, "hog")
        assert isinstance(fv, FeatureVector)
        assert fv.method == "hog"
        assert fv.dim == 1296
        assert np.array_equal(fv.values, HogDescriptor().transform_one(img))

    def test_extract_each_method(self):
        img = np.random.default_rng(19).random((28, 28))
        for method, dim in [("hog", 1296), ("lbp", 784), ("gabor", 784),
                            ("raw", 784)]:
            assert extract(img, method).dim == dim

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            extract(np.ones((28, 28)), "sift")

    def test_mismatched_descriptor_kind(self):
        img = np.ones((28, 28))
        with pytest.raises(ParameterError):
            extract(img, "hog", LbpDescriptor())

    def test_descriptor_instance_passthrough(self):
        img = np.random.default_rng(20).random((28, 28))
        fv = extract(img, "lbp", LbpDescriptor(mode="histogram"))
        assert fv.dim == 1024

    def test_params_dict(self):
        img = np.random.default_rng(21).random((28, 28))
        fv = extract(img, "hog", {"cell_side": 7})
        assert fv.dim == HogDescriptor(cell_side=7).output_dim(28, 28)

    def test_batch_matches_single_any_jobs(self):
        rng = np.random.default_rng(22)
        imgs = rng.random((6, 28, 28))
        one = extract_batch(imgs, "hog", jobs=1)
        four = extract_batch(imgs, "hog", jobs=4)
        assert one.shape == (6, 1296)
        assert one.tobytes() == four.tobytes()
        for i in range(6):
            assert np.array_equal(one[i], HogDescriptor().transform_one(imgs[i]))

    def test_feature_vector_rejects_nonfinite(self):
        with pytest.raises(ShapeError):
            FeatureVector(np.array([1.0, np.nan]), "raw")

    def test_raw_roundtrip(self):
        rng = np.random.default_rng(23)
        imgs = rng.random((3, 28, 28))
        X = RawDescriptor().transform(imgs)
        assert X.shape == (3, 784)
        assert np.array_equal(X[1], imgs[1].ravel())

    def test_make_descriptor_bad_params_type(self):
        with pytest.raises(ParameterError):
            make_descriptor("hog", params=[1, 2])
