import numpy as np
import pytest

from digitbench import ParameterError, ParseError, ShapeError, SplitError
from digitbench.datasets import (LABEL_FIRST, LABEL_LAST, LabeledDataset,
                                 SplitSpec, feature_cache_path, file_digest,
                                 glyph_template, load_csv,
                                 load_feature_cache, preprocess_all,
                                 save_feature_cache, split, split_indices,
                                 synthetic_glyphs, synthetic_squares)
from digitbench.imaging import Preprocessor


def write_csv(path, rows):
    path.write_text("\n".join(",".join(str(v) for v in row)
                              for row in rows) + "\n")


class TestLoadCsv:
    def test_zero_row_label_first(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[7] + [0] * 784])
        images, labels = load_csv(p, LABEL_FIRST, side=28)
        assert images.shape == (1, 28, 28)
        assert labels[0] == 7
        assert np.all(images == 0.0)

    def test_eight_bit_range_divided(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[3] + [255] * 9, [1] + [0] * 9])
        images, _ = load_csv(p, LABEL_FIRST, side=3)
        assert images.max() == 1.0
        assert images[0, 0, 0] == 1.0

    def test_unit_range_kept(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[0.5] * 9 + [4]])
        images, labels = load_csv(p, LABEL_LAST, side=3)
        assert labels[0] == 4
        assert images.max() == 0.5

    def test_order_preserved(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[d] + [d * 10] * 9 for d in range(10)])
        images, labels = load_csv(p, LABEL_FIRST, side=3)
        assert np.array_equal(labels, np.arange(10))
        assert np.array_equal(images[:, 0, 0] * 255,
                              np.arange(10) * 10.0)

    def test_header_row_skipped(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("label," + ",".join(f"p{i}" for i in range(9))
                     + "\n2," + ",".join(["7"] * 9) + "\n")
        _, labels = load_csv(p, LABEL_FIRST, side=3)
        assert np.array_equal(labels, [2])

    def test_ragged_row_names_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1," + ",".join(["0"] * 9) + "\n1,2,3\n")
        with pytest.raises(ParseError, match="row 2"):
            load_csv(p, LABEL_FIRST, side=3)

    def test_non_numeric_names_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1," + ",".join(["0"] * 9) + "\n"
                     "2," + ",".join(["x"] + ["0"] * 8) + "\n")
        with pytest.raises(ParseError, match="row 2"):
            load_csv(p, LABEL_FIRST, side=3)

    def test_label_out_of_range_names_row(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[1] + [0] * 9, [12] + [0] * 9])
        with pytest.raises(ParseError, match="row 2"):
            load_csv(p, LABEL_FIRST, side=3)

    def test_fractional_label_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[1.5] + [0] * 9])
        with pytest.raises(ParseError, match="row 1"):
            load_csv(p, LABEL_FIRST, side=3)

    def test_pixel_out_of_range_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, [[1] + [300] + [0] * 8])
        with pytest.raises(ParseError, match="row 1"):
            load_csv(p, LABEL_FIRST, side=3)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("\n")
        with pytest.raises(ParseError, match="no data"):
            load_csv(p, LABEL_FIRST, side=3)

    def test_bad_schema_rejected(self, tmp_path):
        with pytest.raises(ParameterError):
            load_csv(tmp_path / "d.csv", "label_middle", side=3)

    def test_digest_tracks_content(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        a.write_text("same")
        b.write_text("same")
        assert file_digest(a) == file_digest(b)
        b.write_text("different")
        assert file_digest(a) != file_digest(b)


class TestSplit:
    def test_exact_eighty_twenty_per_class(self):
        y = np.repeat(np.arange(10), 10)
        train, test = split_indices(y, SplitSpec(0.8, seed=0))
        assert train.size == 80 and test.size == 20
        for cls in range(10):
            assert (y[train] == cls).sum() == 8
            assert (y[test] == cls).sum() == 2

    def test_same_seed_same_split(self):
        y = np.random.default_rng(0).integers(0, 5, 200)
        a = split_indices(y, SplitSpec(0.8, seed=42))
        b = split_indices(y, SplitSpec(0.8, seed=42))
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        c = split_indices(y, SplitSpec(0.8, seed=43))
        assert not np.array_equal(a[0], c[0])

    def test_partition_property_many_datasets(self):
        rng = np.random.default_rng(7)
        for trial in range(1000):
            n = int(rng.integers(6, 40))
            y = rng.integers(0, 3, n)
            y[:6] = [0, 0, 1, 1, 2, 2]  # every class populated twice
            spec = SplitSpec(float(rng.uniform(0.2, 0.9)), seed=trial,
                             stratified=bool(trial % 2))
            train, test = split_indices(y, spec)
            merged = np.concatenate([train, test])
            assert merged.size == n
            assert np.array_equal(np.sort(merged), np.arange(n))

    def test_proportion_deviation_below_one_sample(self):
        rng = np.random.default_rng(8)
        for trial in range(50):
            counts = rng.integers(3, 50, size=4)
            y = np.repeat(np.arange(4), counts)
            frac = float(rng.uniform(0.3, 0.9))
            train, _ = split_indices(y, SplitSpec(frac, seed=trial))
            for cls, n_cls in enumerate(counts):
                got = (y[train] == cls).sum()
                assert abs(got - frac * n_cls) <= 0.5

    def test_small_class_rejected_when_stratified(self):
        y = np.array([0, 0, 1])
        with pytest.raises(SplitError, match="class 1"):
            split_indices(y, SplitSpec(0.8, seed=0))
        train, test = split_indices(y, SplitSpec(0.8, seed=0,
                                                 stratified=False))
        assert train.size + test.size == 3

    def test_dataset_split_carries_tags(self):
        X = np.random.default_rng(1).random((40, 5))
        y = np.tile(np.arange(4), 10)
        ds = LabeledDataset(X, y, source="unit:abc", feature_method="hog")
        train, test = split(ds, SplitSpec(0.8, seed=1))
        assert train.source == test.source == "unit:abc"
        assert train.feature_method == "hog"
        assert train.n_samples + test.n_samples == 40

    def test_fraction_validation(self):
        with pytest.raises(ParameterError):
            SplitSpec(train_fraction=1.0)
        with pytest.raises(ParameterError):
            SplitSpec(train_fraction=0.0)

    def test_labeled_dataset_validation(self):
        with pytest.raises(ShapeError):
            LabeledDataset(np.zeros((3, 2)), np.zeros(4, dtype=int))
        with pytest.raises(ShapeError):
            LabeledDataset(np.zeros((2, 2)), np.array([0, 11]))
        with pytest.raises(ShapeError):
            LabeledDataset(np.zeros(4), np.zeros(4, dtype=int))


class TestPreprocessAll:
    def test_count_conserved_and_composition(self):
        rng = np.random.default_rng(2)
        images = rng.random((5, 20, 24))
        pre = Preprocessor()
        out = preprocess_all(images, pre)
        assert out.shape == (5, 28, 28)
        assert np.array_equal(out[3], pre.transform_one(images[3]))

    def test_constant_images_unchanged_without_deskew(self):
        images = np.full((4, 28, 28), 0.375)
        pre = Preprocessor(deskew_enabled=False)
        out = preprocess_all(images, pre)
        assert out == pytest.approx(images, abs=1e-12)

    def test_jobs_do_not_change_output(self):
        rng = np.random.default_rng(3)
        images = rng.random((8, 30, 30))
        a = preprocess_all(images, jobs=1)
        b = preprocess_all(images, jobs=4)
        assert a.tobytes() == b.tobytes()

    def test_error_names_image_index(self):
        images = [np.zeros((10, 10)), np.full((10, 10), 2.0)]
        with pytest.raises(ShapeError, match="image 1"):
            preprocess_all(images, jobs=2)


class TestSynthetic:
    def test_glyphs_deterministic_and_balanced(self):
        a, ya = synthetic_glyphs(100, seed=5)
        b, yb = synthetic_glyphs(100, seed=5)
        assert a.tobytes() == b.tobytes()
        assert np.array_equal(ya, yb)
        assert np.array_equal(np.bincount(ya), np.full(10, 10))
        assert a.shape == (100, 28, 28)
        assert 0.0 <= a.min() and a.max() <= 1.0
        c, _ = synthetic_glyphs(100, seed=6)
        assert a.tobytes() != c.tobytes()

    def test_squares_two_classes(self):
        images, labels = synthetic_squares(40, seed=0)
        assert set(labels.tolist()) == {0, 1}
        # hollow squares carry less ink than their filled siblings
        assert images[labels == 0].sum() > images[labels == 1].sum()

    def test_glyph_template_distinct(self):
        renders = [glyph_template(d).tobytes() for d in range(10)]
        assert len(set(renders)) == 10
        with pytest.raises(ParameterError):
            glyph_template(10)

    def test_sample_count_validated(self):
        with pytest.raises(ParameterError):
            synthetic_glyphs(0)
        with pytest.raises(ParameterError):
            synthetic_squares(0)


class TestFeatureCache:
    def test_round_trip(self, tmp_path):
        X = np.random.default_rng(0).random((6, 9))
        y = np.arange(6) % 3
        path = feature_cache_path(tmp_path, "digest123", "hog",
                                  {"cell_side": 4})
        save_feature_cache(path, X, y)
        loaded = load_feature_cache(path)
        assert loaded is not None
        assert np.array_equal(loaded[0], X)
        assert np.array_equal(loaded[1], y)

    def test_key_depends_on_inputs(self, tmp_path):
        base = feature_cache_path(tmp_path, "d1", "hog", {})
        assert feature_cache_path(tmp_path, "d2", "hog", {}) != base
        assert feature_cache_path(tmp_path, "d1", "lbp", {}) != base
        assert feature_cache_path(tmp_path, "d1", "hog",
                                  {"cell_side": 7}) != base
        assert feature_cache_path(tmp_path, "d1", "hog", {}) == base

    def test_missing_or_foreign_version(self, tmp_path):
        assert load_feature_cache(tmp_path / "absent.npz") is None
        bad = tmp_path / "bad.npz"
        np.savez(bad, version=np.array(999), features=np.zeros((1, 1)),
                 labels=np.zeros(1))
        assert load_feature_cache(bad) is None
