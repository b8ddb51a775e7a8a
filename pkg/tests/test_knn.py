import numpy as np
import pytest
from oracles import knn_oracle

from digitbench import ParameterError, ShapeError, StateError
from digitbench.classify import KnnClassifier


class TestKnnBasics:
    def test_nearest_point(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 10.0]])
        y = np.array([0, 0, 1])
        clf = KnnClassifier(k=1).fit(X, y)
        assert clf.predict([[0.1, 0.0]])[0] == 0

    def test_query_on_training_point(self):
        rng = np.random.default_rng(0)
        X = rng.random((20, 3))
        y = rng.integers(0, 4, 20)
        clf = KnnClassifier(k=1).fit(X, y)
        assert np.array_equal(clf.predict(X), y)

    def test_distance_tie_lower_index_wins(self):
        X = np.array([[0.0, 2.0], [0.0, -2.0]])
        y = np.array([1, 0])
        clf = KnnClassifier(k=1).fit(X, y)
        assert clf.predict([[0.0, 0.0]])[0] == 1

    def test_vote_tie_closest_class_wins(self):
        X = np.array([[1.0, 0.0], [2.0, 0.0]])
        y = np.array([3, 5])
        clf = KnnClassifier(k=2).fit(X, y)
        scores = clf.predict_scores([[0.0, 0.0]])[0]
        assert clf.predict([[0.0, 0.0]])[0] == 3
        assert scores[0] > scores[1]  # classes_ sorted: [3, 5]

    def test_label_is_argmax_of_scores(self):
        rng = np.random.default_rng(1)
        X = rng.random((40, 4))
        y = rng.integers(0, 3, 40)
        clf = KnnClassifier(k=5).fit(X, y)
        Q = rng.random((25, 4))
        scores = clf.predict_scores(Q)
        assert np.array_equal(clf.predict(Q),
                              clf.classes_[np.argmax(scores, axis=1)])

    def test_scores_vote_counts(self):
        rng = np.random.default_rng(2)
        X = rng.random((30, 3))
        y = rng.integers(0, 3, 30)
        clf = KnnClassifier(k=5).fit(X, y)
        scores = clf.predict_scores(rng.random((10, 3)))
        # integer part of each row's scores must total k
        assert np.all(np.floor(scores).sum(axis=1) == 5)


class TestKnnOracle:
    def test_matches_bruteforce_50_points(self):
        rng = np.random.default_rng(3)
        X = rng.random((50, 2))
        y = rng.integers(0, 3, 50)
        Q = rng.random((40, 2))
        clf = KnnClassifier(k=5).fit(X, y)
        assert np.array_equal(clf.predict(Q), knn_oracle(X, y, Q, 5, 2.0))

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_matches_bruteforce_minkowski(self, p):
        rng = np.random.default_rng(4)
        X = rng.random((60, 5))
        y = rng.integers(0, 4, 60)
        Q = rng.random((30, 5))
        clf = KnnClassifier(k=3, minkowski_p=p).fit(X, y)
        assert np.array_equal(clf.predict(Q), knn_oracle(X, y, Q, 3, p))

    def test_blocked_distance_path(self):
        # force multiple query blocks through the block budget path
        rng = np.random.default_rng(5)
        X = rng.random((200, 30))
        y = rng.integers(0, 5, 200)
        Q = rng.random((150, 30))
        clf = KnnClassifier(k=7).fit(X, y)
        assert np.array_equal(clf.predict(Q), knn_oracle(X, y, Q, 7, 2.0))


class TestKnnErrors:
    def test_empty_training_set(self):
        with pytest.raises(StateError):
            KnnClassifier().fit(np.zeros((0, 3)), np.zeros(0, dtype=int))

    def test_unfitted_predict(self):
        with pytest.raises(StateError):
            KnnClassifier().predict([[1.0, 2.0]])

    def test_k_exceeds_train_size(self):
        clf = KnnClassifier(k=9).fit(np.zeros((3, 2)), [0, 1, 0])
        with pytest.raises(ParameterError):
            clf.predict([[0.0, 0.0]])

    def test_bad_params(self):
        with pytest.raises(ParameterError):
            KnnClassifier(k=0).fit(np.zeros((2, 2)), [0, 1])
        with pytest.raises(ParameterError):
            KnnClassifier(minkowski_p=0.5).fit(np.zeros((2, 2)), [0, 1])

    def test_dim_mismatch(self):
        clf = KnnClassifier(k=1).fit(np.zeros((4, 3)), [0, 1, 0, 1])
        with pytest.raises(ShapeError):
            clf.predict(np.zeros((2, 5)))
