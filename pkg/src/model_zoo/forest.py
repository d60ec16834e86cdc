"""
Random forest regression with exact best-split search.

Each tree is grown on a bootstrap resample (n draws with replacement) taken
from ``substream(seed, FOREST_STREAM, tree_index)``. Splits consider every
feature and every midpoint between consecutive distinct sorted values; the
split minimizing the children's summed squared error wins, ties going to the
lowest feature index and then the lowest threshold. Rows with
``x[feature] <= threshold`` go left. No feature subsampling.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..models import ModelFamily
from ..seeding import FOREST_STREAM, substream
from .base_model import BaseEstimator, FittedModel, ModelSpec, validate_training_data

logger = logging.getLogger(__name__)

LEAF = -1
_TIE_TOLERANCE = 1e-12


def best_split(features: np.ndarray, targets: np.ndarray) -> Optional[Tuple[int, float, float]]:
    """Return (feature, threshold, children SSE) of the best split, or None if no split exists."""
    n, d = features.shape
    best: Optional[Tuple[int, float, float]] = None
    for feature in range(d):
        order = np.argsort(features[:, feature], kind="stable")
        xs = features[order, feature]
        ys = targets[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        left_n = np.arange(1, n)
        right_n = n - left_n
        left_sse = csq[:-1] - csum[:-1] ** 2 / left_n
        right_sse = (csq[-1] - csq[:-1]) - (csum[-1] - csum[:-1]) ** 2 / right_n
        total = np.where(valid, left_sse + right_sse, np.inf)
        lowest = total.min()
        position = int(np.flatnonzero(total <= lowest + _TIE_TOLERANCE * max(1.0, abs(lowest)))[0])
        sse = float(total[position])
        if best is None or sse < best[2] - _TIE_TOLERANCE * max(1.0, abs(best[2])):
            threshold = 0.5 * (xs[position] + xs[position + 1])
            if threshold >= xs[position + 1]:
                threshold = float(xs[position])
            best = (feature, float(threshold), sse)
    return best


class RegressionTree:
    """A binary regression tree stored as flat node arrays."""

    def __init__(self, max_depth: int):
        self.max_depth = max_depth
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    def _add_node(self, value: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        return len(self.value) - 1

    def _grow(self, features: np.ndarray, targets: np.ndarray, depth: int) -> int:
        node = self._add_node(float(targets.mean()))
        # pure node
        if depth >= self.max_depth or targets.shape[0] < 2 or np.all(targets == targets[0]):
            return node
        split = best_split(features, targets)
        if split is None:
            return node
        feature, threshold, _ = split
        goes_left = features[:, feature] <= threshold
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = self._grow(features[goes_left], targets[goes_left], depth + 1)
        self.right[node] = self._grow(features[~goes_left], targets[~goes_left], depth + 1)
        return node

    def fit(self, features: np.ndarray, targets: np.ndarray) -> "RegressionTree":
        self._grow(features, targets, depth=0)
        self._feature = np.asarray(self.feature, dtype=np.int64)
        self._threshold = np.asarray(self.threshold, dtype=np.float64)
        self._left = np.asarray(self.left, dtype=np.int64)
        self._right = np.asarray(self.right, dtype=np.int64)
        self._value = np.asarray(self.value, dtype=np.float64)
        return self

    @property
    def node_count(self) -> int:
        return len(self.value)

    def predict(self, features: np.ndarray) -> np.ndarray:
        node = np.zeros(features.shape[0], dtype=np.int64)
        rows = np.arange(features.shape[0])
        for _ in range(self.max_depth):
            internal = self._feature[node] != LEAF
            if not internal.any():
                break
            active = rows[internal]
            current = node[active]
            goes_left = features[active, self._feature[current]] <= self._threshold[current]
            node[active] = np.where(goes_left, self._left[current], self._right[current])
        return self._value[node]


class ForestModel(FittedModel):
    """Mean of bootstrap regression trees."""

    def __init__(self, spec: ModelSpec, trees: List[RegressionTree], dimension: int, **provenance):
        super().__init__(spec, dimension=dimension, **provenance)
        self.trees = tuple(trees)

    def _predict(self, features: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict(features) for tree in self.trees], axis=0)


def fit_forest(
    features: np.ndarray,
    targets: np.ndarray,
    n_tree: int,
    max_depth: int,
    seed: int = 0,
    spec: Optional[ModelSpec] = None,
    **provenance,
) -> ForestModel:
    features, targets = validate_training_data(features, targets)
    spec = spec or ModelSpec(family=ModelFamily.RANDOM_FOREST, n_tree=n_tree, max_depth=max_depth, seed=seed)
    n = targets.shape[0]
    trees = []
    for tree_index in range(n_tree):
        sample = substream(seed, FOREST_STREAM, tree_index).integers(0, n, size=n)
        trees.append(RegressionTree(max_depth).fit(features[sample], targets[sample]))
    return ForestModel(spec, trees, features.shape[1], training_count=n, **provenance)


class ForestEstimator(BaseEstimator):
    """Random forest family."""

    def __init__(self):
        super().__init__(
            ModelFamily.RANDOM_FOREST,
            "Bootstrap ensemble of exact-split regression trees, all features at every split",
            ["n_tree", "max_depth", "seed"],
        )

    def fit(self, features, targets, spec: ModelSpec, **provenance) -> FittedModel:
        return fit_forest(features, targets, spec.n_tree, spec.max_depth, spec.seed, spec=spec, **provenance)
