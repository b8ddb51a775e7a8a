"""Array-backed decision trees shared by the forest and boosting learners.

A tree is stored as parallel node arrays. Internal nodes route a sample left
when ``x[feature] < threshold`` and right otherwise; leaves carry a payload
row (class counts for classification trees, a single value for regression
stumps in the boosting ensemble).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF = -1


@dataclass
class Tree:
    feature: np.ndarray    # (n_nodes,) int32, LEAF marks a leaf
    threshold: np.ndarray  # (n_nodes,) float64
    left: np.ndarray       # (n_nodes,) int32
    right: np.ndarray      # (n_nodes,) int32
    value: np.ndarray      # (n_nodes, value_dim) float64

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index for every row of X."""
        idx = np.zeros(X.shape[0], dtype=np.intp)
        while True:
            feat = self.feature[idx]
            rows = np.nonzero(feat != LEAF)[0]
            if rows.size == 0:
                return idx
            at = idx[rows]
            go_left = X[rows, feat[rows]] < self.threshold[at]
            idx[rows] = np.where(go_left, self.left[at], self.right[at])

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def max_depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        deepest = 0
        for node in range(self.n_nodes):  # children follow parents
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
            else:
                deepest = max(deepest, int(depths[node]))
        return deepest


class TreeBuilder:
    """Accumulates nodes during growth, then freezes into a Tree."""

    def __init__(self, value_dim: int):
        self.value_dim = value_dim
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[np.ndarray] = []

    def add_leaf(self, value) -> int:
        return self._add(LEAF, 0.0, value)

    def add_split(self, feature: int, threshold: float, value) -> int:
        return self._add(int(feature), float(threshold), value)

    def _add(self, feature: int, threshold: float, value) -> int:
        node = len(self.feature)
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(np.asarray(value, dtype=np.float64).reshape(self.value_dim))
        return node

    def set_children(self, node: int, left: int, right: int) -> None:
        self.left[node] = left
        self.right[node] = right

    def freeze(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int32),
            right=np.asarray(self.right, dtype=np.int32),
            value=np.stack(self.value) if self.value else
            np.zeros((0, self.value_dim)),
        )
