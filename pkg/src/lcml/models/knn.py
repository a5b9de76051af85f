"""Brute-force k-nearest-neighbors classification.

Distances are exact Euclidean over all features. Tie conventions are
pinned: equal distances prefer the lower training-row index, and an
even-k class tie goes to the class of the single nearest neighbor
(then class 0 as a final fallback).
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, ShapeError

__all__ = ["KNearestNeighbors", "knn_predict", "knn_vote_fractions"]

# cap the scratch distance block at ~64 MB
_BLOCK_BUDGET = 8_000_000


def _neighbor_table(train_X, queries, k):
    train_X = np.ascontiguousarray(train_X, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    if train_X.ndim != 2 or queries.ndim != 2:
        raise ShapeError("training matrix and queries must be 2-D")
    if train_X.shape[1] != queries.shape[1]:
        raise ShapeError(
            f"query width {queries.shape[1]} does not match training width {train_X.shape[1]}"
        )
    n_train = train_X.shape[0]
    if not (1 <= k <= n_train):
        raise ConfigError(f"k must satisfy 1 <= k <= {n_train}, got {k}")

    train_sq = np.einsum("ij,ij->i", train_X, train_X)
    block = max(1, _BLOCK_BUDGET // max(1, n_train))
    out = np.empty((queries.shape[0], k), dtype=np.int64)
    for start in range(0, queries.shape[0], block):
        q = queries[start : start + block]
        d2 = np.einsum("ij,ij->i", q, q)[:, None] - 2.0 * (q @ train_X.T) + train_sq
        # stable sort: equal distances resolve to the lower training index
        out[start : start + len(q)] = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return out


def knn_predict(train_X, train_y, queries, k: int) -> np.ndarray:
    """Majority vote over the k nearest training rows of each query."""
    train_y = np.asarray(train_y, dtype=np.int64).ravel()
    neighbors = _neighbor_table(train_X, queries, k)
    votes = train_y[neighbors]
    ones = votes.sum(axis=1)
    zeros = k - ones
    nearest = votes[:, 0]
    labels = np.where(ones > zeros, 1, np.where(zeros > ones, 0, nearest))
    return labels.astype(np.int64)


def knn_vote_fractions(train_X, train_y, queries, k: int) -> np.ndarray:
    """Fraction of the k nearest neighbors voting for class 1."""
    train_y = np.asarray(train_y, dtype=np.int64).ravel()
    neighbors = _neighbor_table(train_X, queries, k)
    return train_y[neighbors].sum(axis=1) / float(k)


class KNearestNeighbors:
    """Uniform-vote KNN behind the common fit/predict contract."""

    def __init__(self, k: int = 4):
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        self.k = k
        self.train_X = None
        self.train_y = None

    def fit(self, X, y):
        self.train_X = np.ascontiguousarray(X, dtype=np.float64)
        self.train_y = np.asarray(y, dtype=np.int64).ravel()
        if self.train_X.shape[0] != self.train_y.shape[0]:
            raise ShapeError(
                f"{self.train_X.shape[0]} rows but {self.train_y.shape[0]} labels"
            )
        if self.k > self.train_X.shape[0]:
            raise ConfigError(
                f"k={self.k} exceeds the {self.train_X.shape[0]} stored training rows"
            )
        return self

    def _require_fit(self):
        if self.train_X is None:
            raise ShapeError("model is not fitted")

    def predict(self, X):
        self._require_fit()
        return knn_predict(self.train_X, self.train_y, X, self.k)

    def predict_proba(self, X):
        self._require_fit()
        return knn_vote_fractions(self.train_X, self.train_y, X, self.k)
