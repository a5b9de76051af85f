"""Random forest of Gini-split decision trees.

Each tree trains on a bootstrap resample (N draws with replacement)
using its own derived substream, so forests are reproducible bit-for-bit
whatever the worker thread count. At every node a random subset of
feature indices is inspected and the (feature, threshold) pair with the
best Gini gain wins; candidate thresholds sit at midpoints between
consecutive distinct sorted values.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ShapeError
from ..parallel import thread_count
from ..rng import substream

__all__ = ["DecisionTree", "RandomForest", "build_tree", "gini_impurity"]

_LEAF = -1


def gini_impurity(n0: int, n1: int) -> float:
    """Gini impurity 1 - p0^2 - p1^2 of a two-class count pair."""
    total = n0 + n1
    if total <= 0:
        raise ValueError("gini impurity of an empty node is undefined")
    p0 = n0 / total
    p1 = n1 / total
    return 1.0 - p0 * p0 - p1 * p1


@dataclass
class DecisionTree:
    """Flat array encoding: ``feature[i] == -1`` marks a leaf.

    Internal nodes route ``x[feature] <= threshold`` to ``left``;
    leaves carry the class counts seen at fit time.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    n0: np.ndarray
    n1: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def leaf_ids(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = np.flatnonzero(feat != _LEAF)
            if active.size == 0:
                return node
            cur = node[active]
            go_left = X[active, feat[active]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Majority class of the reached leaf; count ties go to class 0."""
        leaves = self.leaf_ids(X)
        return (self.n1[leaves] > self.n0[leaves]).astype(np.int64)


def _best_split(X, y, rows, feats, min_samples_leaf):
    """Return (feature, threshold) maximizing Gini gain, or None.

    Maximizing gain is equivalent to maximizing
    sum over children of (n0_c^2 + n1_c^2) / n_c, which the prefix-sum
    scan below evaluates for every candidate in one pass per feature.
    """
    n = rows.shape[0]
    sub = X[np.ix_(rows, feats)]
    yn = y[rows]
    n1_total = float(yn.sum())
    left_sizes = np.arange(1, n, dtype=np.float64)
    best_q = -np.inf
    best = None
    for j in range(feats.shape[0]):
        x = sub[:, j]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        c1 = np.cumsum(yn[order])[:-1].astype(np.float64)
        valid = xs[1:] > xs[:-1]
        if min_samples_leaf > 1:
            valid &= (left_sizes >= min_samples_leaf) & (n - left_sizes >= min_samples_leaf)
        if not valid.any():
            continue
        n0_left = left_sizes - c1
        n1_right = n1_total - c1
        n0_right = (n - left_sizes) - n1_right
        q = (n0_left * n0_left + c1 * c1) / left_sizes + (
            n0_right * n0_right + n1_right * n1_right
        ) / (n - left_sizes)
        q[~valid] = -np.inf
        i = int(np.argmax(q))  # first max: lowest threshold wins ties
        if q[i] > best_q:
            best_q = q[i]
            best = (int(feats[j]), 0.5 * (xs[i] + xs[i + 1]))
    return best


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    rng: np.random.Generator,
    max_features: int,
    min_samples_leaf: int = 1,
    max_depth: int | None = None,
) -> DecisionTree:
    """Grow one tree on the given (possibly repeated) row indices.

    Nodes are expanded depth-first, left child first; the feature subset
    for each node is drawn from ``rng`` in that fixed order, which pins
    the tree for a given generator state.
    """
    n_features = X.shape[1]
    feature, threshold, left, right, n0s, n1s = [], [], [], [], [], []
    # stack entries: (rows, depth, parent id, is_left_child)
    stack = [(np.asarray(rows, dtype=np.int64), 0, -1, False)]
    while stack:
        node_rows, depth, parent, is_left = stack.pop()
        node_id = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node_id
        yn = y[node_rows]
        n1 = int(yn.sum())
        n0 = node_rows.shape[0] - n1

        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(_LEAF)
        right.append(_LEAF)
        n0s.append(n0)
        n1s.append(n1)

        if (
            n0 == 0
            or n1 == 0
            or node_rows.shape[0] < 2 * min_samples_leaf
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        feats = rng.choice(n_features, size=max_features, replace=False)
        found = _best_split(X, y, node_rows, feats, min_samples_leaf)
        if found is None:
            continue
        feat, thr = found
        mask = X[node_rows, feat] <= thr
        if mask.all() or not mask.any():
            continue  # threshold landed on a value; cannot separate
        feature[node_id] = feat
        threshold[node_id] = thr
        stack.append((node_rows[~mask], depth + 1, node_id, False))
        stack.append((node_rows[mask], depth + 1, node_id, True))

    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        n0=np.asarray(n0s, dtype=np.int64),
        n1=np.asarray(n1s, dtype=np.int64),
    )


class RandomForest:
    """Bootstrap ensemble of Gini decision trees.

    ``max_features`` is ``"sqrt"`` (floor of sqrt(width), the
    classification default), ``"all"``, or an explicit count. Prediction
    is a majority vote over trees; an exact vote tie yields class 0.
    """

    def __init__(
        self,
        n_trees: int = 250,
        seed: int = 0,
        max_features: str | int = "sqrt",
        min_samples_leaf: int = 1,
        max_depth: int | None = None,
    ):
        if n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {n_trees}")
        if min_samples_leaf < 1:
            raise ConfigError(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")
        if max_depth is not None and max_depth < 1:
            raise ConfigError(f"max_depth must be >= 1 or None, got {max_depth}")
        self.n_trees = n_trees
        self.seed = seed
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.max_depth = max_depth
        self.trees: list[DecisionTree] = []
        self.n_features = None

    def _resolve_max_features(self, width: int) -> int:
        mf = self.max_features
        if mf == "sqrt":
            return max(1, int(np.sqrt(width)))
        if mf == "all":
            return width
        if isinstance(mf, (int, np.integer)) and not isinstance(mf, bool):
            if not (1 <= int(mf) <= width):
                raise ConfigError(f"max_features must be in [1, {width}], got {mf}")
            return int(mf)
        raise ConfigError(f"max_features must be 'sqrt', 'all', or an int, got {mf!r}")

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64).ravel()
        if X.ndim != 2 or X.shape[0] == 0:
            raise ShapeError(f"training matrix must be non-empty 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"{X.shape[0]} rows but {y.shape[0]} labels")
        if ((y != 0) & (y != 1)).any():
            raise ShapeError("labels must be binary 0/1")
        n = X.shape[0]
        m = self._resolve_max_features(X.shape[1])

        def grow(tree_index: int) -> DecisionTree:
            rng = substream(self.seed, tree_index)
            bootstrap = rng.integers(0, n, size=n)
            return build_tree(
                X, y, bootstrap, rng, m, self.min_samples_leaf, self.max_depth
            )

        workers = min(thread_count(), self.n_trees)
        if workers == 1:
            self.trees = [grow(t) for t in range(self.n_trees)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                self.trees = list(pool.map(grow, range(self.n_trees)))
        self.n_features = X.shape[1]
        return self

    def _check(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        if not self.trees:
            raise ShapeError("model is not fitted")
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ShapeError(
                f"query width {X.shape[-1] if X.ndim else '?'} does not match "
                f"training width {self.n_features}"
            )
        return X

    def vote_counts(self, X) -> np.ndarray:
        """Number of trees voting class 1 for each query row."""
        X = self._check(X)
        votes = np.zeros(X.shape[0], dtype=np.int64)
        for tree in self.trees:
            votes += tree.predict(X)
        return votes

    def predict(self, X):
        votes = self.vote_counts(X)
        return (2 * votes > self.n_trees).astype(np.int64)

    def predict_proba(self, X):
        return self.vote_counts(X) / float(self.n_trees)
